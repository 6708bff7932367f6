use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{LogicalGateCost, NoiseSpec};
use crate::error::{QhamError, Result};
use crate::simcore::{Gate, StateVector};
use crate::transpile::{decompose_gate, BasisGate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// With the event probability, a uniformly random non-identity Pauli on
    /// all listed qubits.
    Depolarizing,
    /// `|1⟩ → |0⟩` decay with the event probability (trajectory unraveling).
    AmplitudeDamping,
    /// Pure dephasing that shrinks coherences by `1 − p`; unraveled as a Z
    /// flip with probability `p / 2`.
    PhaseDamping,
}

/// One stochastic error attached after a gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorEvent {
    pub kind: ErrorKind,
    pub qubits: Vec<usize>,
    pub probability: f64,
}

/// Amplitude- and phase-damping probabilities for an interval of `t_ns`.
///
/// `p_amp = 1 − exp(−t/T1)`, `p_phase = 1 − exp(−t/Tφ)` with
/// `1/Tφ = 1/T2 − 1/(2·T1)`.
pub fn thermal_probabilities(t_ns: f64, t1_us: f64, t2_us: f64) -> (f64, f64) {
    let t_us = t_ns * 1e-3;
    let p_amp = 1.0 - (-t_us / t1_us).exp();
    let dephasing_rate = (1.0 / t2_us - 0.5 / t1_us).max(0.0);
    let p_phase = 1.0 - (-t_us * dephasing_rate).exp();
    (p_amp.clamp(0.0, 1.0), p_phase.clamp(0.0, 1.0))
}

/// Depolarizing parameter λ (ρ → (1−λ)ρ + λ·I/d) for "non-identity Pauli
/// with probability p" on `k` qubits, and back.
fn lambda_from_pauli_prob(p: f64, k: usize) -> f64 {
    let d2 = (1u32 << (2 * k)) as f64;
    (p * d2 / (d2 - 1.0)).min(1.0)
}

fn pauli_prob_from_lambda(lambda: f64, k: usize) -> f64 {
    let d2 = (1u32 << (2 * k)) as f64;
    lambda * (d2 - 1.0) / d2
}

fn cnot_error(spec: &NoiseSpec, gate: &Gate) -> Result<f64> {
    spec.device.cnot_err.ok_or_else(|| {
        QhamError::Contract(format!("{gate} needs a two-qubit error rate but device {} has none", spec.device.name))
    })
}

/// Error events that follow `gate` under `spec`, in application order.
///
/// Zero-probability events are omitted, so a noise model with all rates at zero
/// yields no events and leaves sampling streams untouched.
pub fn channels_for_gate(gate: &Gate, spec: &NoiseSpec) -> Result<Vec<ErrorEvent>> {
    if !gate.is_unitary() {
        return Err(QhamError::UnsupportedHere(gate.to_string()));
    }
    let qubits = gate.qubit_list();
    let dev = &spec.device;
    let dur = &spec.durations;

    // (depolarizing prob on all gate qubits, per-qubit 1q prob, duration)
    let native = spec.logical_cost == LogicalGateCost::Native || crate::transpile::BasisGate::from_gate(gate).is_some();
    let (p_joint, p_single, t_ns): (f64, Vec<(usize, f64)>, f64) = if native {
        if qubits.len() == 2 {
            (cnot_error(spec, gate)?, vec![], dur.cnot_ns)
        } else {
            (dev.sx_err, vec![], dur.single_qubit_ns)
        }
    } else {
        let pieces = decompose_gate(gate)?;
        let mut keep_joint = 1.0;
        let mut keep_single: Vec<(usize, f64)> = vec![];
        let mut t = 0.0;
        for piece in &pieces {
            match *piece {
                BasisGate::Cnot { .. } => {
                    keep_joint *= 1.0 - lambda_from_pauli_prob(cnot_error(spec, gate)?, 2);
                    t += dur.cnot_ns;
                }
                _ => {
                    let q = piece.qubits()[0];
                    let keep = 1.0 - lambda_from_pauli_prob(dev.sx_err, 1);
                    match keep_single.iter_mut().find(|(qq, _)| *qq == q) {
                        Some((_, k)) => *k *= keep,
                        None => keep_single.push((q, keep)),
                    }
                    t += dur.single_qubit_ns;
                }
            }
        }
        if qubits.len() == 1 {
            let keep = keep_single.first().map_or(1.0, |&(_, k)| k);
            (pauli_prob_from_lambda(1.0 - keep, 1), vec![], t)
        } else {
            let single = keep_single.into_iter().map(|(q, k)| (q, pauli_prob_from_lambda(1.0 - k, 1))).collect();
            (pauli_prob_from_lambda(1.0 - keep_joint, 2), single, t)
        }
    };

    let mut events = Vec::new();
    if spec.channels.depolarizing {
        if p_joint > 0.0 {
            events.push(ErrorEvent {
                kind: ErrorKind::Depolarizing,
                qubits: qubits.clone(),
                probability: p_joint.clamp(0.0, 1.0),
            });
        }
        for (q, p) in p_single {
            if p > 0.0 {
                events.push(ErrorEvent {
                    kind: ErrorKind::Depolarizing,
                    qubits: vec![q],
                    probability: p.clamp(0.0, 1.0),
                });
            }
        }
    }
    if spec.channels.thermal {
        let (p_amp, p_phase) = thermal_probabilities(t_ns, dev.t1_us, dev.t2_us);
        for &q in &qubits {
            if p_amp > 0.0 {
                events.push(ErrorEvent { kind: ErrorKind::AmplitudeDamping, qubits: vec![q], probability: p_amp });
            }
            if p_phase > 0.0 {
                events.push(ErrorEvent { kind: ErrorKind::PhaseDamping, qubits: vec![q], probability: p_phase });
            }
        }
    }
    Ok(events)
}

/// Samples one error event onto a trajectory.
pub(crate) fn apply_event<R: Rng + ?Sized>(state: &mut StateVector, event: &ErrorEvent, rng: &mut R) {
    let u: f64 = rng.gen();
    match event.kind {
        ErrorKind::Depolarizing => {
            if u < event.probability {
                let k = event.qubits.len();
                let code: u32 = rng.gen_range(1..(1u32 << (2 * k)));
                for (i, &q) in event.qubits.iter().enumerate() {
                    state.apply_pauli(q, ((code >> (2 * i)) & 3) as u8);
                }
            }
        }
        ErrorKind::AmplitudeDamping => {
            state.amplitude_damp(event.qubits[0], event.probability, u);
        }
        ErrorKind::PhaseDamping => {
            if u < event.probability / 2.0 {
                state.phase_flip(event.qubits[0]);
            }
        }
    }
}

/// Flips `bit` with probability `p`. No draw is taken when `p == 0`.
pub fn apply_readout_error<R: Rng + ?Sized>(bit: bool, p: f64, rng: &mut R) -> bool {
    if p <= 0.0 {
        return bit;
    }
    if rng.gen::<f64>() < p {
        !bit
    } else {
        bit
    }
}
