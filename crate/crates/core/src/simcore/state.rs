use num_complex::Complex64;

use super::gate::{Gate, GateAction, Mat2};
use crate::error::{QhamError, Result};

/// Largest register `init_state` accepts unless a caller raises the cap.
pub const DEFAULT_MAX_QUBITS: usize = 26;

/// Dense amplitude vector over `qubit_count` qubits.
///
/// Qubit 0 is the least-significant bit of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubit_count: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `qubit_count` qubits, capped at [`DEFAULT_MAX_QUBITS`].
    pub fn new(qubit_count: usize) -> Result<Self> {
        Self::with_max_qubits(qubit_count, DEFAULT_MAX_QUBITS)
    }

    pub fn with_max_qubits(qubit_count: usize, max_qubits: usize) -> Result<Self> {
        if qubit_count == 0 || qubit_count > max_qubits {
            return Err(QhamError::Size(format!("{qubit_count} qubits requested; allowed range is 1..={max_qubits}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubit_count];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { qubit_count, amps })
    }

    /// Wraps explicit amplitudes. The length must be a power of two and the
    /// norm must be 1 within 1e-9.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QhamError::Size(format!("{len} amplitudes is not 2^q for q >= 1")));
        }
        let s = StateVector { qubit_count: len.trailing_zeros() as usize, amps };
        if (s.norm_sqr() - 1.0).abs() > 1e-9 {
            return Err(QhamError::Contract(format!("state norm^2 is {}", s.norm_sqr())));
        }
        Ok(s)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.qubit_count {
            return Err(QhamError::Contract(format!("qubit {q} out of range for a {}-qubit state", self.qubit_count)));
        }
        Ok(())
    }

    /// Applies a unitary gate in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.qubit_count, usize::MAX)?;
        match gate.action() {
            None => Err(QhamError::UnsupportedHere(gate.to_string())),
            Some(action) => {
                self.apply_action(&action);
                Ok(())
            }
        }
    }

    pub(crate) fn apply_action(&mut self, action: &GateAction) {
        match *action {
            GateAction::Single { qubit, matrix } => self.apply_single(qubit, &matrix),
            GateAction::Controlled { control, target, matrix } => self.apply_controlled(control, target, &matrix),
            GateAction::Swap { a, b } => self.apply_swap(a, b),
        }
    }

    pub(crate) fn apply_single(&mut self, q: usize, m: &Mat2) {
        let stride = 1usize << q;
        for base in (0..self.amps.len()).step_by(stride << 1) {
            for i in base..base + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub(crate) fn apply_controlled(&mut self, control: usize, target: usize, m: &Mat2) {
        let cmask = 1usize << control;
        let stride = 1usize << target;
        for base in (0..self.amps.len()).step_by(stride << 1) {
            for i in base..base + stride {
                if i & cmask == 0 {
                    continue;
                }
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub(crate) fn apply_swap(&mut self, a: usize, b: usize) {
        let (ma, mb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            // visit each (…1_a…0_b…) index once and exchange with its partner
            if i & ma != 0 && i & mb == 0 {
                self.amps.swap(i, i ^ ma ^ mb);
            }
        }
    }

    /// Probability that measuring qubit `q` yields 1.
    pub fn prob_one(&self, q: usize) -> Result<f64> {
        self.check_qubit(q)?;
        Ok(self.prob_one_unchecked(q))
    }

    pub(crate) fn prob_one_unchecked(&self, q: usize) -> f64 {
        let mask = 1usize << q;
        let p: f64 = self.amps.iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, a)| a.norm_sqr()).sum();
        p.clamp(0.0, 1.0)
    }

    /// Per-qubit `P(|1⟩)` for every qubit, in one pass.
    pub fn marginals(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.qubit_count];
        for (i, a) in self.amps.iter().enumerate() {
            let w = a.norm_sqr();
            if w == 0.0 {
                continue;
            }
            for (q, pq) in p.iter_mut().enumerate() {
                if i >> q & 1 == 1 {
                    *pq += w;
                }
            }
        }
        p.into_iter().map(|x| x.clamp(0.0, 1.0)).collect()
    }

    /// Collapses qubit `q` onto `outcome` and renormalizes. Returns the
    /// probability the outcome had before projection.
    pub fn project(&mut self, q: usize, outcome: bool) -> Result<f64> {
        self.check_qubit(q)?;
        let p1 = self.prob_one_unchecked(q);
        let p = if outcome { p1 } else { 1.0 - p1 };
        if p <= 0.0 {
            return Err(QhamError::Domain(format!("outcome {} on qubit {q} has zero probability", outcome as u8)));
        }
        self.collapse(q, outcome, p);
        Ok(p)
    }

    fn collapse(&mut self, q: usize, outcome: bool, p: f64) {
        let mask = 1usize << q;
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & mask != 0) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Projective Z measurement of `q` driven by a uniform draw `u ∈ [0, 1)`.
    pub fn measure(&mut self, q: usize, u: f64) -> Result<bool> {
        self.check_qubit(q)?;
        let p1 = self.prob_one_unchecked(q);
        let outcome = u < p1;
        let p = if outcome { p1 } else { 1.0 - p1 };
        self.collapse(q, outcome, p);
        Ok(outcome)
    }

    /// Measure, then flip to `|0⟩` if the outcome was 1.
    pub fn reset(&mut self, q: usize, u: f64) -> Result<bool> {
        let outcome = self.measure(q, u)?;
        if outcome {
            self.flip(q);
        }
        Ok(outcome)
    }

    pub(crate) fn flip(&mut self, q: usize) {
        let stride = 1usize << q;
        for base in (0..self.amps.len()).step_by(stride << 1) {
            for i in base..base + stride {
                self.amps.swap(i, i + stride);
            }
        }
    }

    /// Phase flip `|1⟩ → −|1⟩` on qubit `q`.
    pub(crate) fn phase_flip(&mut self, q: usize) {
        let mask = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask != 0 {
                *a = -*a;
            }
        }
    }

    /// Pauli by code: 0 = I, 1 = X, 2 = Y, 3 = Z (global phases dropped).
    pub(crate) fn apply_pauli(&mut self, q: usize, code: u8) {
        match code {
            1 => self.flip(q),
            2 => {
                // Y = i·X·Z; the global i is dropped
                self.phase_flip(q);
                self.flip(q);
            }
            3 => self.phase_flip(q),
            _ => {}
        }
    }

    /// One trajectory step of amplitude damping with decay probability `p`.
    /// Returns whether the jump `|1⟩ → |0⟩` happened.
    pub(crate) fn amplitude_damp(&mut self, q: usize, p: f64, u: f64) -> bool {
        let p1 = self.prob_one_unchecked(q);
        let p_jump = p * p1;
        let mask = 1usize << q;
        if u < p_jump {
            let scale = 1.0 / p1.sqrt();
            for i in 0..self.amps.len() {
                if i & mask != 0 {
                    self.amps[i ^ mask] = self.amps[i] * scale;
                    self.amps[i] = Complex64::new(0.0, 0.0);
                }
            }
            true
        } else {
            let keep = (1.0 - p).sqrt();
            let scale = 1.0 / (1.0 - p_jump).sqrt();
            for (i, a) in self.amps.iter_mut().enumerate() {
                if i & mask != 0 {
                    *a *= keep * scale;
                } else {
                    *a *= scale;
                }
            }
            false
        }
    }

    /// Basis index drawn from `|amplitude|²` by inverse CDF on `u ∈ [0, 1)`.
    pub fn sample_index(&self, u: f64) -> usize {
        let target = u * self.norm_sqr();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (i, a) in self.amps.iter().enumerate() {
            let w = a.norm_sqr();
            if w > 0.0 {
                acc += w;
                last_nonzero = i;
                if target < acc {
                    return i;
                }
            }
        }
        last_nonzero
    }
}
