//! Statevector simulation.
//!
//! Qubit 0 is the least significant bit of an amplitude index. Bit strings
//! are printed qubit 0 (or classical bit 0) first.

mod circuit;
pub mod dense;
mod exec;
mod gate;
mod state;

pub use circuit::{Circuit, Instruction, RusBlock};
pub use dense::{dense_unitary, gate_matrix, DenseMatrix};
pub use exec::{bitstring, run_shot, sample_counts, Counts, Executor, ShotOutcome};
pub use gate::{
    identity_matrix, ry_matrix, rz_matrix, sx_matrix, x_matrix, y_matrix, z_matrix, Gate, GateAction, Mat2,
};
pub use state::{StateVector, DEFAULT_MAX_QUBITS};
