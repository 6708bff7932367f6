use std::collections::BTreeMap;

use anyhow::{bail, Result};
use qham::qham::{density_accuracy, hebbian, run_recall, RecallOptions};
use qham::rng::substream;
use qham::{Pattern, ProbeState, QhamError, UpdateSchedule};
use serde::Serialize;

use crate::args::{ConfigArg, GlobalArgs};
use crate::config::{check_schema, load, resolve_noise, RecallConfig, ScheduleSpec};
use crate::output::{emit, RunManifest};

/// Substream of the root seed that draws random schedules.
const SCHEDULE_STREAM: u64 = 0x5c4e_d01e;

#[derive(Debug, Serialize)]
pub struct RecallOutput {
    pub n: usize,
    pub schedule: Vec<usize>,
    pub per_qubit_p1: Vec<f64>,
    /// Row-major square reshape of `per_qubit_p1` when `n` is a perfect square.
    pub grid: Option<Vec<Vec<f64>>>,
    pub majority_vote: Vec<u8>,
    pub majority_bitstring: String,
    pub target: String,
    pub recalled: bool,
    pub density_accuracy: f64,
    pub exact: bool,
    pub shots: u64,
    pub aborted: u64,
    pub counts: BTreeMap<String, u64>,
}

#[derive(Debug, Serialize)]
struct QubitRow {
    qubit: usize,
    row: Option<usize>,
    col: Option<usize>,
    p1: f64,
    vote: u8,
    target: u8,
}

fn side(n: usize) -> Option<usize> {
    let s = (n as f64).sqrt().round() as usize;
    (s * s == n && n > 0).then_some(s)
}

pub fn run(global: &GlobalArgs, args: &ConfigArg) -> Result<()> {
    let mut cfg: RecallConfig = load(&args.config)?;
    check_schema(cfg.schema_version, &args.config)?;
    if let Some(s) = global.shots {
        cfg.shots = Some(s);
    }
    if let Some(n) = &global.noise {
        cfg.noise = Some(n.clone());
    }
    let attractors = cfg.attractors.iter().map(|p| p.pattern()).collect::<Result<Vec<Pattern>>>()?;
    if attractors.is_empty() {
        bail!(QhamError::Config { path: "attractors".into(), message: "at least one attractor is needed".into() });
    }
    let w = hebbian(&attractors)?;
    let probe = ProbeState::new(cfg.probe.clone())?;
    let n = probe.len();
    let schedule = match &cfg.schedule {
        ScheduleSpec::Targets(t) => UpdateSchedule::new(t.clone(), cfg.ancilla_mode),
        ScheduleSpec::Random { random } => {
            UpdateSchedule::random(n, *random, cfg.ancilla_mode, &mut substream(global.seed, &[SCHEDULE_STREAM]))
        }
    };
    let opts = RecallOptions {
        shots: cfg.shots.unwrap_or(RecallOptions::default().shots),
        seed: global.seed,
        noise: resolve_noise(global, cfg.noise.as_deref())?,
        neuron: cfg.neuron,
        max_attempts: cfg.max_attempts,
        trajectories: cfg.trajectories,
    };
    let r = run_recall(&probe, &w, &schedule, &opts)?;
    let vote = Pattern::from_bits(&r.majority_vote.iter().map(|&b| b == 1).collect::<Vec<_>>())?;
    let target = match &cfg.target {
        Some(t) => t.pattern()?,
        // nearest attractor, first on ties
        None => attractors.iter().min_by_key(|a| a.hamming(&vote)).expect("non-empty").clone(),
    };
    let out = RecallOutput {
        n,
        schedule: schedule.targets.clone(),
        grid: side(n).map(|s| r.per_qubit_p1.chunks(s).map(<[f64]>::to_vec).collect()),
        majority_bitstring: vote.bitstring(),
        target: target.bitstring(),
        recalled: vote == target,
        density_accuracy: density_accuracy(&r.per_qubit_p1, &target)?,
        exact: r.exact,
        shots: r.shots,
        aborted: r.aborted,
        per_qubit_p1: r.per_qubit_p1,
        majority_vote: r.majority_vote,
        counts: r.counts,
    };
    let s = side(n);
    let rows: Vec<QubitRow> = (0..n)
        .map(|q| QubitRow {
            qubit: q,
            row: s.map(|s| q / s),
            col: s.map(|s| q % s),
            p1: out.per_qubit_p1[q],
            vote: out.majority_vote[q],
            target: u8::from(target.entries()[q] == 1),
        })
        .collect();
    let manifest = RunManifest::new("recall", &serde_json::json!({ "file": args.config, "effective": cfg }), global)?;
    emit(global, &manifest, &out, &rows)
}
