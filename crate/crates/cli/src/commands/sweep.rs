use std::f64::consts::FRAC_PI_2;

use anyhow::Result;
use qham::neuron::{activation, rus_attempt_exact, rus_success_probability, sweep_neuron, sweep_plan, ActivationKind};
use qham::rng::substream;
use qham::simcore::{sample_counts, Gate, StateVector};
use qham::transpile::transpile_circuit;
use rand::Rng;
use serde::Serialize;

use crate::args::{GlobalArgs, SweepArgs};
use crate::config::resolve_noise;
use crate::output::{emit, RunManifest};
use crate::UsageError;

const DEFAULT_SHOTS: u64 = 8192;

#[derive(Debug, Serialize)]
struct SweepRow {
    phi: f64,
    analytic: f64,
    simulated_p1: f64,
    /// Binomial standard error; absent for exact values.
    std_err: Option<f64>,
    /// Per-attempt success chance of the repeat-until-success neuron.
    success_probability: Option<f64>,
    shots: Option<u64>,
    aborted: Option<u64>,
}

/// `points` evenly spaced half-angles with exact endpoints.
pub fn grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| if i + 1 == points { FRAC_PI_2 } else { FRAC_PI_2 * i as f64 / (points - 1) as f64 }).collect()
}

pub fn run(global: &GlobalArgs, args: &SweepArgs) -> Result<()> {
    if args.points < 2 {
        return Err(UsageError("--points must be at least 2".into()).into());
    }
    if args.max_attempts == 0 {
        return Err(UsageError("--max-attempts must be at least 1".into()).into());
    }
    let noise = resolve_noise(global, None)?;
    let sampled = args.sampled || noise.is_some() || global.shots.is_some();
    let shots = global.shots.unwrap_or(DEFAULT_SHOTS);
    let mut rows = Vec::with_capacity(args.points);
    for (i, phi) in grid(args.points).into_iter().enumerate() {
        let analytic = activation(args.kind, phi)?;
        let success_probability = (args.kind == ActivationKind::Rus).then(|| rus_success_probability(phi));
        let row = if sampled {
            let mut circuit = sweep_neuron(args.kind, phi, args.max_attempts)?;
            let mut measured = qham::Circuit::new(circuit.qubit_count(), 1);
            measured.append(&circuit)?;
            measured.push(Gate::measure(1, 0))?;
            circuit = match &noise {
                Some(_) => transpile_circuit(&measured)?.0,
                None => measured,
            };
            let seed = substream(global.seed, &[i as u64]).gen::<u64>();
            let counts = sample_counts(&circuit, shots, seed, noise.as_ref())?;
            let done = counts.completed();
            let p = if done == 0 { 0.0 } else { counts.ones_per_bit()[0] as f64 / done as f64 };
            SweepRow {
                phi,
                analytic,
                simulated_p1: p,
                std_err: Some((p * (1.0 - p) / done.max(1) as f64).sqrt()),
                success_probability,
                shots: Some(shots),
                aborted: Some(counts.aborted),
            }
        } else {
            let p = match args.kind {
                ActivationKind::Simplified => {
                    let mut s = StateVector::new(3)?;
                    for g in sweep_neuron(args.kind, phi, args.max_attempts)?.gates() {
                        s.apply(g)?;
                    }
                    s.prob_one(1)?
                }
                ActivationKind::Rus => {
                    rus_attempt_exact(&sweep_plan(phi)?.with_rus_input(3)?, |q| q == 0)?.p1_given_success
                }
            };
            SweepRow { phi, analytic, simulated_p1: p, std_err: None, success_probability, shots: None, aborted: None }
        };
        rows.push(row);
    }
    let manifest = RunManifest::new("neuron-sweep", &serde_json::json!({ "args": args, "sampled": sampled }), global)?;
    emit(global, &manifest, &rows, &rows)
}
