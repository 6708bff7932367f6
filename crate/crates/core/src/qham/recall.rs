use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::population::{weight_scale, Populations};
use super::{
    encode, majority_vote, qubit_overhead, rus_qubit_overhead, AncillaMode, ProbeState, UpdateSchedule, WeightMatrix,
};
use crate::error::{contract, QhamError, Result};
use crate::neuron::{
    build_rus_neuron, build_rus_unrolled, build_simplified_neuron, ActivationKind, NeuronPlan, DEFAULT_MAX_ATTEMPTS,
};
use crate::noise::NoiseSpec;
use crate::rng::substream;
use crate::simcore::{bitstring, sample_counts, Circuit, Gate, DEFAULT_MAX_QUBITS};
use crate::transpile::transpile_circuit;

/// Qubit assignment of a recall circuit. Data qubit `i` is qubit `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecallLayout {
    pub n: usize,
    pub qubit_count: usize,
    /// `(ancilla, flag)` of update `k`; the flag only for repeat-until-success.
    pub update_qubits: Vec<(usize, Option<usize>)>,
}

pub fn recall_layout(n: usize, schedule: &UpdateSchedule, kind: ActivationKind) -> RecallLayout {
    let u = schedule.len();
    let rus = kind == ActivationKind::Rus;
    let update_qubits = (0..u)
        .map(|k| {
            let base = match schedule.ancilla_mode {
                AncillaMode::ResetReuse => n,
                AncillaMode::FreshAncilla if rus => n + 2 * k,
                AncillaMode::FreshAncilla => n + k,
            };
            (base, rus.then_some(base + 1))
        })
        .collect();
    let qubit_count =
        if rus { rus_qubit_overhead(n, u, schedule.ancilla_mode) } else { qubit_overhead(n, u, schedule.ancilla_mode) };
    RecallLayout { n, qubit_count, update_qubits }
}

/// Neuron plan for an update of `target`: every other data qubit is a
/// control with weight `w[target][j]`, zero weights included.
pub fn update_plan(w: &WeightMatrix, target: usize, ancilla: usize, rus_input: Option<usize>) -> Result<NeuronPlan> {
    let (gamma, w_max) = weight_scale(w)?;
    let controls = (0..w.n()).filter(|&j| j != target).map(|j| (j, w.get(target, j))).collect();
    let plan = NeuronPlan::new(target, ancilla, controls, gamma, w_max)?;
    match rus_input {
        Some(q) => plan.with_rus_input(q),
        None => Ok(plan),
    }
}

/// Neuron plans of every scheduled update, wired per the recall layout.
pub fn update_plans(w: &WeightMatrix, schedule: &UpdateSchedule, kind: ActivationKind) -> Result<Vec<NeuronPlan>> {
    schedule.validate(w.n())?;
    let layout = recall_layout(w.n(), schedule, kind);
    schedule
        .targets
        .iter()
        .zip(&layout.update_qubits)
        .map(|(&target, &(ancilla, flag))| update_plan(w, target, ancilla, flag))
        .collect()
}

fn check(n: usize, w: &WeightMatrix, schedule: &UpdateSchedule) -> Result<()> {
    if w.n() != n {
        return Err(contract(format!("probe has {n} entries, weights are {0}×{0}", w.n())));
    }
    schedule.validate(n)
}

/// One circuit per scheduled update, each over the full recall register.
/// A reused ancilla is reset at the end of its segment. With
/// `rus_failures`, repeat-until-success updates are unrolled with that many
/// failures and no flag measurements.
pub fn update_segments(
    w: &WeightMatrix,
    schedule: &UpdateSchedule,
    kind: ActivationKind,
    max_attempts: u32,
    rus_failures: Option<u32>,
) -> Result<Vec<Circuit>> {
    schedule.validate(w.n())?;
    let layout = recall_layout(w.n(), schedule, kind);
    let mut segments = Vec::with_capacity(schedule.len());
    for (&target, &(ancilla, flag)) in schedule.targets.iter().zip(&layout.update_qubits) {
        let mut c = Circuit::new(layout.qubit_count, 0);
        let plan = update_plan(w, target, ancilla, flag)?;
        match (kind, rus_failures) {
            (ActivationKind::Simplified, _) => {
                c.extend(build_simplified_neuron(&plan)?)?;
            }
            (ActivationKind::Rus, None) => {
                for ins in build_rus_neuron(&plan, max_attempts)? {
                    c.push_instruction(ins)?;
                }
            }
            (ActivationKind::Rus, Some(f)) => {
                c.extend(build_rus_unrolled(&plan, f)?)?;
            }
        }
        if schedule.ancilla_mode == AncillaMode::ResetReuse {
            c.push(Gate::reset(ancilla))?;
        }
        segments.push(c);
    }
    Ok(segments)
}

fn push_updates(
    c: &mut Circuit,
    w: &WeightMatrix,
    schedule: &UpdateSchedule,
    kind: ActivationKind,
    max_attempts: u32,
    rus_failures: Option<u32>,
) -> Result<()> {
    for seg in update_segments(w, schedule, kind, max_attempts, rus_failures)? {
        c.append(&seg)?;
    }
    Ok(())
}

/// Encoding, updates in schedule order, then `Measure(i, i)` on every data
/// qubit. Reused ancillas are reset after each update.
pub fn build_recall_circuit(
    probe: &ProbeState,
    w: &WeightMatrix,
    schedule: &UpdateSchedule,
    kind: ActivationKind,
    max_attempts: u32,
) -> Result<Circuit> {
    let n = probe.len();
    check(n, w, schedule)?;
    let layout = recall_layout(n, schedule, kind);
    let mut c = Circuit::new(layout.qubit_count, n);
    c.extend(encode(probe))?;
    push_updates(&mut c, w, schedule, kind, max_attempts, None)?;
    for i in 0..n {
        c.push(Gate::measure(i, i))?;
    }
    Ok(c)
}

/// The update machinery alone: no encoding and no measurements.
pub fn build_update_circuit(
    w: &WeightMatrix,
    schedule: &UpdateSchedule,
    kind: ActivationKind,
    max_attempts: u32,
) -> Result<Circuit> {
    schedule.validate(w.n())?;
    let mut c = Circuit::new(recall_layout(w.n(), schedule, kind).qubit_count, 0);
    push_updates(&mut c, w, schedule, kind, max_attempts, None)?;
    Ok(c)
}

/// Repeat-until-success updates, each failing exactly `failures` times,
/// unrolled into a flat gate list.
pub fn build_rus_forced_updates(w: &WeightMatrix, schedule: &UpdateSchedule, failures: u32) -> Result<Circuit> {
    schedule.validate(w.n())?;
    let mut c = Circuit::new(recall_layout(w.n(), schedule, ActivationKind::Rus).qubit_count, 0);
    push_updates(&mut c, w, schedule, ActivationKind::Rus, 1, Some(failures))?;
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallOptions {
    pub shots: u64,
    pub seed: u64,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub neuron: ActivationKind,
    #[serde(default = "default_attempts")]
    pub max_attempts: u32,
    /// Simulate every shot on a statevector even without noise.
    #[serde(default)]
    pub trajectories: bool,
}

fn default_attempts() -> u32 {
    DEFAULT_MAX_ATTEMPTS
}

impl Default for RecallOptions {
    fn default() -> Self {
        RecallOptions {
            shots: 8192,
            seed: 0,
            noise: None,
            neuron: ActivationKind::Simplified,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            trajectories: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallResult {
    /// Exact when `exact` is set, empirical otherwise.
    pub per_qubit_p1: Vec<f64>,
    pub counts: BTreeMap<String, u64>,
    pub majority_vote: Vec<u8>,
    pub shots: u64,
    /// Shots abandoned by a repeat-until-success update.
    pub aborted: u64,
    pub exact: bool,
}

/// Runs a recall. Noiseless runs use the exact population table for the
/// marginals and draw counts from it; noisy runs lower the circuit to the
/// basis and simulate trajectories.
pub fn run_recall(
    probe: &ProbeState,
    w: &WeightMatrix,
    schedule: &UpdateSchedule,
    opts: &RecallOptions,
) -> Result<RecallResult> {
    let n = probe.len();
    check(n, w, schedule)?;
    if opts.shots == 0 {
        return Err(contract("shots must be at least 1"));
    }
    let layout = recall_layout(n, schedule, opts.neuron);
    if layout.qubit_count > DEFAULT_MAX_QUBITS {
        return Err(QhamError::Size(format!(
            "recall needs {} qubits, the simulator allows {DEFAULT_MAX_QUBITS}",
            layout.qubit_count
        )));
    }

    if opts.noise.is_none() && !opts.trajectories {
        let mut pop = Populations::from_probe(probe)?;
        for (&target, &(ancilla, flag)) in schedule.targets.iter().zip(&layout.update_qubits) {
            pop.apply_update(&update_plan(w, target, ancilla, flag)?, opts.neuron, opts.max_attempts)?;
        }
        let sampler = pop.sampler();
        let mut rng = substream(opts.seed, &[]);
        let mut counts = BTreeMap::new();
        let mut ones = vec![0u64; n];
        let mut aborted = 0;
        for _ in 0..opts.shots {
            match sampler.sample(&mut rng) {
                Some(x) => {
                    let bits: Vec<bool> = (0..n).map(|q| x >> q & 1 == 1).collect();
                    for (o, &b) in ones.iter_mut().zip(&bits) {
                        *o += u64::from(b);
                    }
                    *counts.entry(bitstring(&bits)).or_insert(0) += 1;
                }
                None => aborted += 1,
            }
        }
        return Ok(RecallResult {
            per_qubit_p1: pop.marginals(),
            counts,
            majority_vote: majority_vote(&ones, (opts.shots - aborted).max(1))?,
            shots: opts.shots,
            aborted,
            exact: true,
        });
    }

    let circuit = build_recall_circuit(probe, w, schedule, opts.neuron, opts.max_attempts)?;
    let circuit = match opts.noise {
        Some(_) => transpile_circuit(&circuit)?.0,
        None => circuit,
    };
    let counts = sample_counts(&circuit, opts.shots, opts.seed, opts.noise.as_ref())?;
    let completed = counts.completed();
    Ok(RecallResult {
        per_qubit_p1: counts.frequencies(),
        majority_vote: majority_vote(&counts.ones_per_bit(), completed.max(1))?,
        counts: counts.histogram,
        shots: opts.shots,
        aborted: counts.aborted,
        exact: false,
    })
}
