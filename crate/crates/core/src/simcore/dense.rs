//! Dense-matrix reference evolution.
//!
//! Full `2^q × 2^q` gate matrices are built entry by entry from each gate's
//! local matrix, independently of the strided kernels in `state`. This is the
//! oracle the kernels and the transpiler decompositions are checked against.

use num_complex::Complex64;

use super::circuit::{Circuit, Instruction};
use super::gate::{Gate, GateAction};
use crate::error::{QhamError, Result};

pub const DENSE_MAX_QUBITS: usize = 6;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        DenseMatrix { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        DenseMatrix { dim, data: rows.into_iter().flatten().collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        DenseMatrix { dim: n, data: out }
    }

    pub fn apply_to(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim).map(|r| (0..self.dim).map(|c| self.data[r * self.dim + c] * v[c]).sum()).collect()
    }

    /// Largest elementwise deviation from `other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest elementwise deviation after aligning one global phase.
    pub fn max_abs_diff_up_to_phase(&self, other: &DenseMatrix) -> f64 {
        let overlap: Complex64 = self.data.iter().zip(&other.data).map(|(a, b)| b.conj() * a).sum();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b * phase).norm()).fold(0.0, f64::max)
    }
}

/// Full-register matrix for one unitary gate.
pub fn gate_matrix(gate: &Gate, qubit_count: usize) -> Result<DenseMatrix> {
    gate.validate(qubit_count, usize::MAX)?;
    let action = gate.action().ok_or_else(|| QhamError::Contract(format!("{gate} has no unitary matrix")))?;
    let dim = 1usize << qubit_count;
    let bit = |x: usize, q: usize| (x >> q) & 1;
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let v = match action {
                GateAction::Single { qubit, matrix } => {
                    if (r ^ c) & !(1 << qubit) != 0 {
                        continue;
                    }
                    matrix[bit(r, qubit)][bit(c, qubit)]
                }
                GateAction::Controlled { control, target, matrix } => {
                    if (r ^ c) & !(1 << target) != 0 {
                        continue;
                    }
                    if bit(c, control) == 1 {
                        matrix[bit(r, target)][bit(c, target)]
                    } else if r == c {
                        Complex64::new(1.0, 0.0)
                    } else {
                        continue;
                    }
                }
                GateAction::Swap { a, b } => {
                    let swapped = if bit(c, a) != bit(c, b) { c ^ (1 << a) ^ (1 << b) } else { c };
                    if r != swapped {
                        continue;
                    }
                    Complex64::new(1.0, 0.0)
                }
            };
            data[r * dim + c] = v;
        }
    }
    Ok(DenseMatrix { dim, data })
}

/// Product of the full gate matrices in application order.
pub fn dense_unitary(circuit: &Circuit) -> Result<DenseMatrix> {
    let q = circuit.qubit_count();
    if q == 0 || q > DENSE_MAX_QUBITS {
        return Err(QhamError::Size(format!("dense unitary supports 1..={DENSE_MAX_QUBITS} qubits, got {q}")));
    }
    let mut u = DenseMatrix::identity(1 << q);
    for ins in circuit.instructions() {
        match ins {
            Instruction::Gate(g) if g.is_unitary() => u = gate_matrix(g, q)?.mul(&u),
            Instruction::Gate(g) => {
                return Err(QhamError::Contract(format!("{g} is not unitary")));
            }
            Instruction::RepeatUntilSuccess(_) => {
                return Err(QhamError::Contract("repeat-until-success block is not unitary".into()));
            }
        }
    }
    Ok(u)
}
