use serde::{Deserialize, Serialize};

use super::gate::Gate;
use crate::error::{contract, Result};

/// A repeat-until-success block.
///
/// Each attempt runs `body`, then measures `flag`. Outcome 0 ends the block.
/// Outcome 1 runs `recovery` and tries again, up to `max_attempts` attempts;
/// exhausting them marks the shot as aborted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RusBlock {
    pub body: Vec<Gate>,
    pub flag: usize,
    pub recovery: Vec<Gate>,
    pub max_attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Instruction {
    Gate(Gate),
    RepeatUntilSuccess(RusBlock),
}

impl From<Gate> for Instruction {
    fn from(g: Gate) -> Self {
        Instruction::Gate(g)
    }
}

/// Ordered instruction list over a fixed qubit and classical-bit register.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Circuit {
    qubit_count: usize,
    cbit_count: usize,
    instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(qubit_count: usize, cbit_count: usize) -> Self {
        Circuit { qubit_count, cbit_count, instructions: Vec::new() }
    }

    /// Builds a circuit from a gate list, validating every gate.
    pub fn from_gates(qubit_count: usize, cbit_count: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Circuit::new(qubit_count, cbit_count);
        c.extend(gates)?;
        Ok(c)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn cbit_count(&self) -> usize {
        self.cbit_count
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.qubit_count, self.cbit_count)?;
        self.instructions.push(Instruction::Gate(gate));
        Ok(self)
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<&mut Self> {
        for g in gates {
            self.push(g)?;
        }
        Ok(self)
    }

    pub fn push_rus(&mut self, block: RusBlock) -> Result<&mut Self> {
        if block.flag >= self.qubit_count {
            return Err(contract(format!("RUS flag qubit {} out of range", block.flag)));
        }
        if block.max_attempts == 0 {
            return Err(contract("RUS block needs at least one attempt"));
        }
        for g in block.body.iter().chain(&block.recovery) {
            g.validate(self.qubit_count, self.cbit_count)?;
        }
        if block.body.iter().any(|g| !g.is_unitary()) {
            return Err(contract("RUS body must be unitary; the flag measurement is implicit"));
        }
        self.instructions.push(Instruction::RepeatUntilSuccess(block));
        Ok(self)
    }

    pub fn push_instruction(&mut self, ins: Instruction) -> Result<&mut Self> {
        match ins {
            Instruction::Gate(g) => self.push(g),
            Instruction::RepeatUntilSuccess(b) => self.push_rus(b),
        }
    }

    /// Appends every instruction of `other`, which must fit this register.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        for ins in &other.instructions {
            self.push_instruction(ins.clone())?;
        }
        Ok(self)
    }

    /// Every gate in program order, RUS bodies and recoveries included once.
    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.instructions.iter().flat_map(|ins| -> Box<dyn Iterator<Item = &Gate>> {
            match ins {
                Instruction::Gate(g) => Box::new(std::iter::once(g)),
                Instruction::RepeatUntilSuccess(b) => Box::new(b.body.iter().chain(&b.recovery)),
            }
        })
    }

    /// True when the circuit holds only unitary gates.
    pub fn is_unitary(&self) -> bool {
        self.instructions.iter().all(|ins| matches!(ins, Instruction::Gate(g) if g.is_unitary()))
    }

    pub fn has_measurements(&self) -> bool {
        self.gates().any(|g| matches!(g, Gate::Measure { .. }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_validates() {
        let mut c = Circuit::new(2, 1);
        assert!(c.push(Gate::x(2)).is_err());
        assert!(c.push(Gate::measure(0, 1)).is_err());
        c.push(Gate::x(0)).unwrap().push(Gate::measure(0, 0)).unwrap();
        assert_eq!(c.len(), 2);
        assert!(!c.is_unitary());
        assert!(c.has_measurements());
    }

    #[test]
    fn rus_body_must_be_unitary() {
        let mut c = Circuit::new(2, 1);
        let block =
            RusBlock { body: vec![Gate::ry(0, 0.3), Gate::measure(0, 0)], flag: 0, recovery: vec![], max_attempts: 3 };
        assert!(c.push_rus(block).is_err());
    }
}
