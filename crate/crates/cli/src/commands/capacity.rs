use anyhow::{bail, Result};
use qham::capacity::{run_capacity, tune_u, CapacityConfig, CapacityReport, CapacityRow};
use qham::QhamError;
use serde::Serialize;

use crate::args::{ConfigArg, GlobalArgs};
use crate::config::{check_schema, load, resolve_noise, CapacityFile};
use crate::output::{emit, RunManifest};

const DEFAULT_SHOTS: u64 = 1024;

#[derive(Debug, Serialize)]
struct Tuned {
    n: usize,
    m: usize,
    best_u: usize,
    curve: Vec<CapacityReport>,
}

#[derive(Debug, Serialize)]
struct CurveRow {
    n: usize,
    m: usize,
    alpha: f64,
    rho: f64,
    rho_eff: f64,
    u: usize,
    mv_accuracy: f64,
    density_accuracy: f64,
    trials: usize,
    shots: u64,
    noise_device: String,
    best_u: usize,
}

impl CurveRow {
    fn new(r: CapacityRow, best_u: usize) -> Self {
        CurveRow {
            n: r.n,
            m: r.m,
            alpha: r.alpha,
            rho: r.rho,
            rho_eff: r.rho_eff,
            u: r.u,
            mv_accuracy: r.mv_accuracy,
            density_accuracy: r.density_accuracy,
            trials: r.trials,
            shots: r.shots,
            noise_device: r.noise_device,
            best_u,
        }
    }
}

/// Runs every `(n, m)` pair of the file, at `u` or across `u_range`.
pub fn run(global: &GlobalArgs, args: &ConfigArg, tune: bool) -> Result<()> {
    let mut file: CapacityFile = load(&args.config)?;
    check_schema(file.schema_version, &args.config)?;
    if let Some(s) = global.shots {
        file.shots = Some(s);
    }
    if let Some(n) = &global.noise {
        file.noise = Some(n.clone());
    }
    let noise = resolve_noise(global, file.noise.as_deref())?;
    let u_values = if tune { file.u_values()? } else { vec![] };
    let u = match (tune, file.u) {
        (true, _) => 0,
        (false, Some(u)) => u,
        (false, None) => bail!(QhamError::Config { path: "u".into(), message: "required by capacity".into() }),
    };
    let mut reports = Vec::new();
    let mut tuned = Vec::new();
    for &n in &file.n.values() {
        for &m in &file.m.values() {
            let cfg = CapacityConfig {
                trials: file.trials,
                shots: file.shots.unwrap_or(DEFAULT_SHOTS),
                noise: noise.clone(),
                seed: global.seed,
                ancilla_mode: file.ancilla_mode,
                neuron: file.neuron,
                max_attempts: file.max_attempts,
                ..CapacityConfig::new(n, m, file.rho, u)
            };
            if tune {
                let t = tune_u(&cfg, &u_values)?;
                tuned.push(Tuned { n, m, best_u: t.best_u, curve: t.curve });
            } else {
                reports.push(run_capacity(&cfg)?);
            }
        }
    }
    let name = if tune { "tune-u" } else { "capacity" };
    let manifest = RunManifest::new(name, &serde_json::json!({ "file": args.config, "effective": file }), global)?;
    if tune {
        let rows: Vec<CurveRow> =
            tuned.iter().flat_map(|t| t.curve.iter().map(move |r| CurveRow::new(r.row(), t.best_u))).collect();
        emit(global, &manifest, &tuned, &rows)
    } else {
        let rows: Vec<CapacityRow> = reports.iter().map(CapacityReport::row).collect();
        emit(global, &manifest, &reports, &rows)
    }
}
