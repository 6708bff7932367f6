use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::circuit::{Circuit, Instruction, RusBlock};
use super::gate::{Gate, GateAction};
use super::state::StateVector;
use crate::error::{contract, Result};
use crate::noise::{apply_event, apply_readout_error, channels_for_gate, ErrorEvent, NoiseSpec};
use crate::rng::substream;

/// Result of one execution of a circuit.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ShotOutcome {
    /// Classical register. For circuits without any `Measure`, one bit per
    /// qubit sampled at the end.
    pub bits: Vec<bool>,
    /// Failed attempts of each repeat-until-success block, in execution order.
    pub rus_failures: Vec<u32>,
    /// Set when a repeat-until-success block ran out of attempts.
    pub aborted: bool,
    /// Per-qubit `P(|1⟩)` of the final state, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_marginals: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
enum Step {
    Unitary(GateAction, Vec<ErrorEvent>),
    Measure { qubit: usize, cbit: usize },
    Reset(usize),
    Rus { body: Vec<Step>, flag: usize, recovery: Vec<Step>, max_attempts: u32 },
}

/// A circuit with its noise events resolved once, ready for many shots.
#[derive(Debug, Clone)]
pub struct Executor {
    qubit_count: usize,
    cbit_count: usize,
    steps: Vec<Step>,
    readout: f64,
    terminal_sample: bool,
    max_qubits: usize,
}

fn prepare_gate(gate: &Gate, noise: Option<&NoiseSpec>) -> Result<Step> {
    Ok(match *gate {
        Gate::Measure { qubit, cbit } => Step::Measure { qubit, cbit },
        Gate::Reset { qubit } => Step::Reset(qubit),
        _ => {
            let events = match noise {
                Some(spec) => channels_for_gate(gate, spec)?,
                None => Vec::new(),
            };
            Step::Unitary(gate.action().expect("unitary gate has an action"), events)
        }
    })
}

fn prepare_block(block: &RusBlock, noise: Option<&NoiseSpec>) -> Result<Step> {
    Ok(Step::Rus {
        body: block.body.iter().map(|g| prepare_gate(g, noise)).collect::<Result<_>>()?,
        flag: block.flag,
        recovery: block.recovery.iter().map(|g| prepare_gate(g, noise)).collect::<Result<_>>()?,
        max_attempts: block.max_attempts,
    })
}

impl Executor {
    pub fn new(circuit: &Circuit, noise: Option<&NoiseSpec>) -> Result<Self> {
        if let Some(spec) = noise {
            spec.validate()?;
        }
        let steps = circuit
            .instructions()
            .iter()
            .map(|ins| match ins {
                Instruction::Gate(g) => prepare_gate(g, noise),
                Instruction::RepeatUntilSuccess(b) => prepare_block(b, noise),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Executor {
            qubit_count: circuit.qubit_count(),
            cbit_count: circuit.cbit_count(),
            steps,
            readout: noise.map_or(0.0, NoiseSpec::readout_probability),
            terminal_sample: !circuit.has_measurements(),
            max_qubits: super::state::DEFAULT_MAX_QUBITS,
        })
    }

    pub fn with_max_qubits(mut self, max_qubits: usize) -> Self {
        self.max_qubits = max_qubits;
        self
    }

    fn is_noiseless_unitary(&self) -> bool {
        self.readout == 0.0 && self.steps.iter().all(|s| matches!(s, Step::Unitary(_, ev) if ev.is_empty()))
    }

    /// Width of the bit strings this executor reports.
    pub fn output_width(&self) -> usize {
        if self.terminal_sample {
            self.qubit_count
        } else {
            self.cbit_count
        }
    }

    /// Runs one shot from `|0…0⟩`.
    pub fn run_shot<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ShotOutcome> {
        let mut state = StateVector::with_max_qubits(self.qubit_count, self.max_qubits)?;
        let mut out = ShotOutcome { bits: vec![false; self.cbit_count], ..Default::default() };
        self.execute(&mut state, rng, &mut out)?;
        if !out.aborted && self.terminal_sample {
            out.bits = self.sample_terminal(&state, rng);
        }
        Ok(out)
    }

    /// Runs the instruction list on an existing state. Terminal sampling is
    /// left to the caller.
    pub fn execute<R: Rng + ?Sized>(&self, state: &mut StateVector, rng: &mut R, out: &mut ShotOutcome) -> Result<()> {
        if state.qubit_count() != self.qubit_count {
            return Err(contract(format!(
                "executor expects {} qubits, state has {}",
                self.qubit_count,
                state.qubit_count()
            )));
        }
        if out.bits.len() < self.cbit_count {
            out.bits.resize(self.cbit_count, false);
        }
        for step in &self.steps {
            if !self.run_step(step, state, rng, out) {
                out.aborted = true;
                break;
            }
        }
        Ok(())
    }

    /// Returns false when the shot must be abandoned.
    fn run_step<R: Rng + ?Sized>(
        &self,
        step: &Step,
        state: &mut StateVector,
        rng: &mut R,
        out: &mut ShotOutcome,
    ) -> bool {
        match step {
            Step::Unitary(action, events) => {
                state.apply_action(action);
                for ev in events {
                    apply_event(state, ev, rng);
                }
            }
            Step::Measure { qubit, cbit } => {
                let bit = state.measure(*qubit, rng.gen()).expect("validated qubit");
                out.bits[*cbit] = apply_readout_error(bit, self.readout, rng);
            }
            Step::Reset(q) => {
                state.reset(*q, rng.gen()).expect("validated qubit");
            }
            Step::Rus { body, flag, recovery, max_attempts } => {
                for attempt in 0..*max_attempts {
                    for s in body {
                        self.run_step(s, state, rng, out);
                    }
                    let raw = state.measure(*flag, rng.gen()).expect("validated qubit");
                    let failed = apply_readout_error(raw, self.readout, rng);
                    if !failed {
                        out.rus_failures.push(attempt);
                        return true;
                    }
                    for s in recovery {
                        if !self.run_step(s, state, rng, out) {
                            return false;
                        }
                    }
                }
                out.rus_failures.push(*max_attempts);
                return false;
            }
        }
        true
    }

    fn sample_terminal<R: Rng + ?Sized>(&self, state: &StateVector, rng: &mut R) -> Vec<bool> {
        let idx = state.sample_index(rng.gen());
        (0..self.qubit_count).map(|q| apply_readout_error(idx >> q & 1 == 1, self.readout, rng)).collect()
    }

    /// Bit string of a measurement sample on `qubits`, drawn from the current
    /// state without collapsing it. Readout error applies.
    pub fn sample_qubits<R: Rng + ?Sized>(&self, state: &StateVector, qubits: &[usize], rng: &mut R) -> Vec<bool> {
        let idx = state.sample_index(rng.gen());
        qubits.iter().map(|&q| apply_readout_error(idx >> q & 1 == 1, self.readout, rng)).collect()
    }
}

/// Executes `circuit` once.
pub fn run_shot<R: Rng + ?Sized>(circuit: &Circuit, rng: &mut R, noise: Option<&NoiseSpec>) -> Result<ShotOutcome> {
    Executor::new(circuit, noise)?.run_shot(rng)
}

/// Histogram of measured bit strings.
///
/// Bit strings list classical bit 0 first. Aborted shots (a
/// repeat-until-success block out of attempts) are counted apart and kept
/// out of the histogram.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub histogram: BTreeMap<String, u64>,
    pub shots: u64,
    pub aborted: u64,
    pub width: usize,
}

pub fn bitstring(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl Counts {
    pub fn new(width: usize) -> Self {
        Counts { width, ..Default::default() }
    }

    pub fn record(&mut self, bits: &[bool]) {
        self.shots += 1;
        *self.histogram.entry(bitstring(bits)).or_insert(0) += 1;
    }

    pub fn record_aborted(&mut self) {
        self.shots += 1;
        self.aborted += 1;
    }

    /// Shots that reached the end.
    pub fn completed(&self) -> u64 {
        self.shots - self.aborted
    }

    /// Number of completed shots with each bit set.
    pub fn ones_per_bit(&self) -> Vec<u64> {
        let mut ones = vec![0u64; self.width];
        for (s, &n) in &self.histogram {
            for (i, ch) in s.chars().enumerate() {
                if ch == '1' {
                    ones[i] += n;
                }
            }
        }
        ones
    }

    /// Empirical `P(1)` per bit over completed shots.
    pub fn frequencies(&self) -> Vec<f64> {
        let done = self.completed().max(1) as f64;
        self.ones_per_bit().into_iter().map(|k| k as f64 / done).collect()
    }
}

/// Runs `shots` shots, shot `k` drawing from substream `(seed, k)`.
///
/// Shots run in parallel on the current rayon pool; the histogram does not
/// depend on the thread count.
pub fn sample_counts(circuit: &Circuit, shots: u64, seed: u64, noise: Option<&NoiseSpec>) -> Result<Counts> {
    if shots == 0 {
        return Err(contract("shots must be at least 1"));
    }
    let exec = Executor::new(circuit, noise)?;
    let mut counts = Counts::new(exec.output_width());

    if exec.is_noiseless_unitary() {
        // one final state; each shot spends exactly the single draw run_shot would
        let mut state = StateVector::with_max_qubits(exec.qubit_count, exec.max_qubits)?;
        for step in &exec.steps {
            if let Step::Unitary(action, _) = step {
                state.apply_action(action);
            }
        }
        let indices: Vec<usize> =
            (0..shots).into_par_iter().map(|k| state.sample_index(substream(seed, &[k]).gen())).collect();
        for idx in indices {
            let bits: Vec<bool> = (0..exec.qubit_count).map(|q| idx >> q & 1 == 1).collect();
            counts.record(&bits);
        }
        return Ok(counts);
    }

    let outcomes: Vec<ShotOutcome> =
        (0..shots).into_par_iter().map(|k| exec.run_shot(&mut substream(seed, &[k]))).collect::<Result<_>>()?;
    for o in outcomes {
        if o.aborted {
            counts.record_aborted();
        } else {
            counts.record(&o.bits);
        }
    }
    Ok(counts)
}
