//! Quantum Hopfield associative memory toolkit.
//!
//! The crate is layered bottom-up:
//!
//! * [`simcore`]: statevector simulation with mid-circuit measurement and reset.
//! * [`noise`]: trajectory noise from device calibration averages.
//! * [`transpile`]: lowering to `{CNOT, ID, Rz, SX, X}`, gate accounting and routing.
//! * [`neuron`]: the simplified and repeat-until-success quantum neurons.
//! * [`qham`]: Hebbian training, recall circuits and accuracy metrics.
//! * [`capacity`]: the Monte Carlo effective-capacity benchmark.

pub mod capacity;
pub mod error;
pub mod neuron;
pub mod noise;
pub mod qham;
pub mod rng;
pub mod simcore;
pub mod transpile;

pub use error::{QhamError, Result};
pub use neuron::{ActivationKind, NeuronPlan};
pub use noise::{DeviceNoiseParams, GateDurations, NoiseSpec};
pub use qham::{AncillaMode, Pattern, ProbeState, RecallResult, UpdateSchedule, WeightMatrix};
pub use simcore::{Circuit, Gate, Instruction, RusBlock, ShotOutcome, StateVector};
pub use transpile::{BasisGate, CouplingMap, GateCounts};
