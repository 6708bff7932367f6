//! Lowering to the hardware basis `{CNOT, ID, Rz, SX, X}`, gate accounting
//! and coupling-map routing.

mod decompose;
mod route;

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::simcore::{Circuit, Gate, Instruction, RusBlock};

pub use decompose::decompose_gate;
pub use route::{route, CouplingMap, RoutedCircuit};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum BasisGate {
    Cnot { control: usize, target: usize },
    Id { qubit: usize },
    Rz { qubit: usize, angle: f64 },
    Sx { qubit: usize },
    X { qubit: usize },
}

impl BasisGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            BasisGate::Cnot { control, target } => vec![control, target],
            BasisGate::Id { qubit }
            | BasisGate::Rz { qubit, .. }
            | BasisGate::Sx { qubit }
            | BasisGate::X { qubit } => {
                vec![qubit]
            }
        }
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self, BasisGate::Cnot { .. })
    }

    /// The basis gate a logical gate already is, if any.
    pub fn from_gate(gate: &Gate) -> Option<BasisGate> {
        Some(match *gate {
            Gate::Cnot { control, target } => BasisGate::Cnot { control, target },
            Gate::Id { qubit } => BasisGate::Id { qubit },
            Gate::Rz { qubit, angle } => BasisGate::Rz { qubit, angle },
            Gate::Sx { qubit } => BasisGate::Sx { qubit },
            Gate::X { qubit } => BasisGate::X { qubit },
            _ => return None,
        })
    }
}

impl From<BasisGate> for Gate {
    fn from(g: BasisGate) -> Gate {
        match g {
            BasisGate::Cnot { control, target } => Gate::cnot(control, target),
            BasisGate::Id { qubit } => Gate::id(qubit),
            BasisGate::Rz { qubit, angle } => Gate::rz(qubit, angle),
            BasisGate::Sx { qubit } => Gate::sx(qubit),
            BasisGate::X { qubit } => Gate::x(qubit),
        }
    }
}

/// Basis-gate tally. Measurements and resets are never counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateCounts {
    pub total: u64,
    pub single_qubit: u64,
    pub cnot: u64,
}

impl GateCounts {
    pub fn new(single_qubit: u64, cnot: u64) -> Self {
        GateCounts { total: single_qubit + cnot, single_qubit, cnot }
    }

    pub fn of(gates: &[BasisGate]) -> Self {
        let cnot = gates.iter().filter(|g| g.is_cnot()).count() as u64;
        GateCounts::new(gates.len() as u64 - cnot, cnot)
    }

    /// Tally of unitary basis gates in an already-lowered circuit.
    pub fn of_circuit(circuit: &Circuit) -> Self {
        let mut c = GateCounts::default();
        for g in circuit.gates().filter(|g| g.is_unitary()) {
            c += if matches!(g, Gate::Cnot { .. }) { GateCounts::new(0, 1) } else { GateCounts::new(1, 0) };
        }
        c
    }
}

impl Add for GateCounts {
    type Output = GateCounts;
    fn add(self, o: GateCounts) -> GateCounts {
        GateCounts::new(self.single_qubit + o.single_qubit, self.cnot + o.cnot)
    }
}

impl AddAssign for GateCounts {
    fn add_assign(&mut self, o: GateCounts) {
        *self = *self + o;
    }
}

impl Mul<u64> for GateCounts {
    type Output = GateCounts;
    fn mul(self, k: u64) -> GateCounts {
        GateCounts::new(self.single_qubit * k, self.cnot * k)
    }
}

impl fmt::Display for GateCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.total, self.single_qubit, self.cnot)
    }
}

fn lower_gates(gates: &[Gate], counts: &mut GateCounts) -> Result<Vec<Gate>> {
    let mut out = Vec::with_capacity(gates.len() * 4);
    for g in gates {
        if g.is_unitary() {
            let pieces = decompose_gate(g)?;
            *counts += GateCounts::of(&pieces);
            out.extend(pieces.into_iter().map(Gate::from));
        } else {
            out.push(*g);
        }
    }
    Ok(out)
}

/// Lowers every unitary gate to the basis; measurements and resets pass
/// through uncounted. Repeat-until-success blocks are lowered in place and
/// their body and recovery are counted once each; use an unrolled circuit to
/// count a particular attempt history.
pub fn transpile_circuit(circuit: &Circuit) -> Result<(Circuit, GateCounts)> {
    let mut counts = GateCounts::default();
    let mut out = Circuit::new(circuit.qubit_count(), circuit.cbit_count());
    for ins in circuit.instructions() {
        match ins {
            Instruction::Gate(g) => {
                out.extend(lower_gates(std::slice::from_ref(g), &mut counts)?)?;
            }
            Instruction::RepeatUntilSuccess(b) => {
                out.push_rus(RusBlock {
                    body: lower_gates(&b.body, &mut counts)?,
                    flag: b.flag,
                    recovery: lower_gates(&b.recovery, &mut counts)?,
                    max_attempts: b.max_attempts,
                })?;
            }
        }
    }
    Ok((out, counts))
}

fn check_nu(n: u64, u: u64) -> Result<()> {
    if n < 2 || u < 1 {
        return Err(contract(format!("count formulas need n ≥ 2 and u ≥ 1, got n = {n}, u = {u}")));
    }
    Ok(())
}

/// `((10n−3)u, (8n−4)u, (2n+1)u)` for `u` simplified-neuron updates.
pub fn predicted_counts_simplified(n: u64, u: u64) -> Result<GateCounts> {
    check_nu(n, u)?;
    Ok(GateCounts { total: (10 * n - 3) * u, single_qubit: (8 * n - 4) * u, cnot: (2 * n + 1) * u })
}

/// Counts for `u` RUS-neuron updates that each fail `f` times before
/// succeeding.
pub fn predicted_counts_rus(n: u64, u: u64, f: u64) -> Result<GateCounts> {
    check_nu(n, u)?;
    Ok(GateCounts {
        total: (20 * n * (f + 1) - 4 * f - 5) * u,
        single_qubit: (16 * n * (f + 1) - f - 5) * u,
        cnot: (4 * n * (f + 1) - 3 * f) * u,
    })
}
