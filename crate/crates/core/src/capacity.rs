//! Monte Carlo effective-capacity benchmark.
//!
//! Each trial draws `m` random patterns, trains Hebbian weights, corrupts one
//! pattern into a probe and recalls it with `u` random updates. A trial is
//! scored by whether the per-qubit majority vote reproduces the source
//! pattern exactly, and by the mean probability of reading each bit right.
//!
//! Randomness is keyed by `(seed, trial, …)` substreams, never by thread, so
//! reports are identical for any thread count. Schedules are drawn
//! sequentially, so the first `u` updates of a longer schedule are the
//! schedule for `u`; a tuning sweep simulates the longest schedule once and
//! scores every prefix on its own sampling stream. Each point of a sweep is
//! bit-identical to a stand-alone run at that `u`.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, QhamError, Result};
use crate::neuron::{ActivationKind, DEFAULT_MAX_ATTEMPTS};
use crate::noise::{LogicalGateCost, NoiseSpec};
use crate::qham::{
    density_accuracy, encode, hebbian, majority_vote, recall_layout, update_plans, update_segments, AncillaMode,
    Pattern, Populations, ProbeState, UpdateSchedule,
};
use crate::rng::substream;
use crate::simcore::{Circuit, Executor, ShotOutcome, StateVector, DEFAULT_MAX_QUBITS};

/// `((1−2ρ)²/2)·n/ln n`, the classical recall capacity.
pub fn classical_capacity(n: usize, rho: f64) -> Result<f64> {
    if n < 2 {
        return Err(QhamError::Domain(format!("capacity needs n ≥ 2, got {n}")));
    }
    check_rho(rho)?;
    let n = n as f64;
    Ok((1.0 - 2.0 * rho).powi(2) / 2.0 * n / n.ln())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..0.5).contains(&rho) {
        return Err(QhamError::Domain(format!("ρ = {rho} outside [0, 0.5)")));
    }
    Ok(())
}

/// Largest integer strictly below `ρn`, or 0.
pub fn max_flips(n: usize, rho: f64) -> usize {
    let x = rho * n as f64;
    if x <= 0.0 {
        return 0;
    }
    let k = x.round();
    // ρn that lands on an integer up to rounding counts as that integer
    if (x - k).abs() < 1e-9 {
        (k as usize).saturating_sub(1)
    } else {
        x.floor() as usize
    }
}

/// `m` patterns of `n` independent uniform ±1 entries.
pub fn gen_patterns<R: Rng + ?Sized>(m: usize, n: usize, rng: &mut R) -> Result<Vec<Pattern>> {
    if m == 0 || n == 0 {
        return Err(contract(format!("need m ≥ 1 and n ≥ 1, got m = {m}, n = {n}")));
    }
    (0..m).map(|_| Pattern::new((0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect())).collect()
}

/// Flips exactly `max_flips(n, ρ)` distinct, uniformly chosen entries.
pub fn gen_probe<R: Rng + ?Sized>(pattern: &Pattern, n: usize, rho: f64, rng: &mut R) -> Result<(ProbeState, usize)> {
    if pattern.len() != n {
        return Err(contract(format!("pattern has {} entries, expected {n}", pattern.len())));
    }
    check_rho(rho)?;
    let flips = max_flips(n, rho);
    let mut probe = pattern.clone();
    for i in sample(rng, n, flips) {
        probe.flip(i);
    }
    Ok((ProbeState::from(&probe), flips))
}

pub fn rho_eff(flips: usize, n: usize) -> Result<f64> {
    if n == 0 || flips > n {
        return Err(contract(format!("need 0 ≤ flips ≤ n, got flips = {flips}, n = {n}")));
    }
    Ok(flips as f64 / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityConfig {
    pub n: usize,
    pub m: usize,
    pub rho: f64,
    #[serde(default)]
    pub u: usize,
    pub trials: usize,
    pub shots: u64,
    #[serde(default)]
    pub noise: Option<NoiseSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub ancilla_mode: AncillaMode,
    #[serde(default)]
    pub neuron: ActivationKind,
    #[serde(default = "default_attempts")]
    pub max_attempts: u32,
}

fn default_attempts() -> u32 {
    DEFAULT_MAX_ATTEMPTS
}

impl CapacityConfig {
    /// Noiseless defaults: 1000 trials of 1024 shots, reused ancilla.
    pub fn new(n: usize, m: usize, rho: f64, u: usize) -> Self {
        CapacityConfig {
            n,
            m,
            rho,
            u,
            trials: 1000,
            shots: 1024,
            noise: None,
            seed: 0,
            ancilla_mode: AncillaMode::ResetReuse,
            neuron: ActivationKind::Simplified,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 || self.trials == 0 || self.shots == 0 {
            return Err(contract("n, m, trials and shots must all be at least 1"));
        }
        if self.max_attempts == 0 {
            return Err(contract("max_attempts must be at least 1"));
        }
        check_rho(self.rho)?;
        if let Some(spec) = &self.noise {
            spec.validate()?;
        }
        Ok(())
    }

    fn qubits_for(&self, u: usize) -> usize {
        let schedule = UpdateSchedule::new(vec![0; u], self.ancilla_mode);
        recall_layout(self.n, &schedule, self.neuron).qubit_count
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub rho: f64,
    pub rho_eff: f64,
    pub u: usize,
    pub mv_accuracy: f64,
    pub density_accuracy: f64,
    pub trials: usize,
    pub shots: u64,
    pub noise_device: Option<String>,
    /// Shots abandoned by repeat-until-success updates, over all trials.
    pub aborted_shots: u64,
    /// Set on the winning point of a tuning sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuned_u: Option<usize>,
}

/// Flat CSV record of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub rho: f64,
    pub rho_eff: f64,
    pub u: usize,
    pub mv_accuracy: f64,
    pub density_accuracy: f64,
    pub trials: usize,
    pub shots: u64,
    pub noise_device: String,
}

impl CapacityReport {
    pub fn row(&self) -> CapacityRow {
        CapacityRow {
            n: self.n,
            m: self.m,
            alpha: self.alpha,
            rho: self.rho,
            rho_eff: self.rho_eff,
            u: self.u,
            mv_accuracy: self.mv_accuracy,
            density_accuracy: self.density_accuracy,
            trials: self.trials,
            shots: self.shots,
            noise_device: self.noise_device.clone().unwrap_or_else(|| "none".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub best_u: usize,
    pub curve: Vec<CapacityReport>,
}

/// Score of one trial at one `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Score {
    recalled: bool,
    density: f64,
    aborted: u64,
}

fn score(ones: &[u64], completed: u64, p1: &[f64], target: &Pattern) -> Result<Score> {
    let vote = majority_vote(ones, completed.max(1))?;
    let recalled = completed > 0 && vote.iter().zip(target.bits()).all(|(&v, b)| (v == 1) == b);
    Ok(Score { recalled, density: density_accuracy(p1, target)?, aborted: 0 })
}

struct Trial {
    target: Pattern,
    probe: ProbeState,
    weights: crate::qham::WeightMatrix,
    schedule: UpdateSchedule,
}

fn draw_trial(cfg: &CapacityConfig, t: u64, u_max: usize) -> Result<Trial> {
    let mut rng = substream(cfg.seed, &[t, 0]);
    let patterns = gen_patterns(cfg.m, cfg.n, &mut rng)?;
    let target = patterns[rng.gen_range(0..cfg.m)].clone();
    let (probe, _) = gen_probe(&target, cfg.n, cfg.rho, &mut rng)?;
    let weights = hebbian(&patterns)?;
    let schedule = UpdateSchedule::random(cfg.n, u_max, cfg.ancilla_mode, &mut substream(cfg.seed, &[t, 1]));
    Ok(Trial { target, probe, weights, schedule })
}

fn noiseless_trial(cfg: &CapacityConfig, t: u64, us: &[usize], trial: &Trial) -> Result<Vec<Score>> {
    let n = cfg.n;
    let plans = update_plans(&trial.weights, &trial.schedule, cfg.neuron)?;
    let mut pop = Populations::from_probe(&trial.probe)?;
    let mut scores = vec![None; us.len()];
    for k in 0..=trial.schedule.len() {
        if us.contains(&k) {
            let sampler = pop.sampler();
            let mut rng = substream(cfg.seed, &[t, 2, k as u64]);
            let mut ones = vec![0u64; n];
            let mut completed = 0;
            for _ in 0..cfg.shots {
                if let Some(x) = sampler.sample(&mut rng) {
                    completed += 1;
                    for (q, o) in ones.iter_mut().enumerate() {
                        *o += (x >> q & 1) as u64;
                    }
                }
            }
            let mut s = score(&ones, completed, &pop.marginals(), &trial.target)?;
            s.aborted = cfg.shots - completed;
            for (slot, _) in scores.iter_mut().zip(us).filter(|(_, &u)| u == k) {
                *slot = Some(s);
            }
        }
        if let Some(plan) = plans.get(k) {
            pop.apply_update(plan, cfg.neuron, cfg.max_attempts)?;
        }
    }
    Ok(scores.into_iter().map(|s| s.expect("every u is a prefix")).collect())
}

fn noisy_trial(cfg: &CapacityConfig, spec: &NoiseSpec, t: u64, us: &[usize], trial: &Trial) -> Result<Vec<Score>> {
    let n = cfg.n;
    let segments = update_segments(&trial.weights, &trial.schedule, cfg.neuron, cfg.max_attempts, None)?;
    let qubits = cfg.qubits_for(trial.schedule.len());
    let encode_exec = Executor::new(&Circuit::from_gates(qubits, 0, encode(&trial.probe))?, Some(spec))?;
    let update_execs = segments.iter().map(|c| Executor::new(c, Some(spec))).collect::<Result<Vec<_>>>()?;
    let data: Vec<usize> = (0..n).collect();

    let mut ones = vec![vec![0u64; n]; us.len()];
    let mut completed = vec![0u64; us.len()];
    for shot in 0..cfg.shots {
        let mut rng = substream(cfg.seed, &[t, 3, shot]);
        let mut state = StateVector::new(qubits)?;
        let mut out = ShotOutcome::default();
        encode_exec.execute(&mut state, &mut rng, &mut out)?;
        for k in 0..=trial.schedule.len() {
            if out.aborted {
                break;
            }
            if us.contains(&k) {
                let mut read_rng = substream(cfg.seed, &[t, 4, shot, k as u64]);
                let bits = encode_exec.sample_qubits(&state, &data, &mut read_rng);
                for (j, _) in us.iter().enumerate().filter(|(_, &u)| u == k) {
                    completed[j] += 1;
                    for (o, &b) in ones[j].iter_mut().zip(&bits) {
                        *o += u64::from(b);
                    }
                }
            }
            if let Some(exec) = update_execs.get(k) {
                exec.execute(&mut state, &mut rng, &mut out)?;
            }
        }
    }
    (0..us.len())
        .map(|j| {
            let done = completed[j].max(1) as f64;
            let p1: Vec<f64> = ones[j].iter().map(|&o| o as f64 / done).collect();
            let mut s = score(&ones[j], completed[j], &p1, &trial.target)?;
            s.aborted = cfg.shots - completed[j];
            Ok(s)
        })
        .collect()
}

/// Scores every trial at every `u` in `us`; `result[trial][j]` is for `us[j]`.
fn evaluate(cfg: &CapacityConfig, us: &[usize]) -> Result<Vec<Vec<Score>>> {
    cfg.validate()?;
    let u_max = *us.iter().max().ok_or_else(|| contract("u range is empty"))?;
    let qubits = cfg.qubits_for(u_max);
    if qubits > DEFAULT_MAX_QUBITS {
        return Err(QhamError::Size(format!(
            "recall needs {qubits} qubits, the simulator allows {DEFAULT_MAX_QUBITS}"
        )));
    }
    // logical gates carry the noise of their basis decomposition
    let spec = cfg.noise.clone().map(|s| s.with_logical_cost(LogicalGateCost::BasisEquivalent));
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let trial = draw_trial(cfg, t, u_max)?;
            match &spec {
                None => noiseless_trial(cfg, t, us, &trial),
                Some(spec) => noisy_trial(cfg, spec, t, us, &trial),
            }
        })
        .collect()
}

fn report(cfg: &CapacityConfig, u: usize, scores: impl Iterator<Item = Score>) -> CapacityReport {
    let (mut hits, mut density, mut aborted) = (0usize, 0.0, 0u64);
    for s in scores {
        hits += usize::from(s.recalled);
        density += s.density;
        aborted += s.aborted;
    }
    let trials = cfg.trials as f64;
    CapacityReport {
        n: cfg.n,
        m: cfg.m,
        alpha: cfg.m as f64 / cfg.n as f64,
        rho: cfg.rho,
        rho_eff: max_flips(cfg.n, cfg.rho) as f64 / cfg.n as f64,
        u,
        mv_accuracy: hits as f64 / trials,
        density_accuracy: density / trials,
        trials: cfg.trials,
        shots: cfg.shots,
        noise_device: cfg.noise.as_ref().map(|s| s.device.name.clone()),
        aborted_shots: aborted,
        tuned_u: None,
    }
}

/// Averages `cfg.trials` trials at `cfg.u`.
pub fn run_capacity(cfg: &CapacityConfig) -> Result<CapacityReport> {
    let scores = evaluate(cfg, &[cfg.u])?;
    Ok(report(cfg, cfg.u, scores.iter().map(|s| s[0])))
}

/// Capacity at every `u` in `u_range` (`cfg.u` is ignored). The best `u`
/// has the highest majority-vote accuracy, the smallest `u` winning ties.
pub fn tune_u(cfg: &CapacityConfig, u_range: &[usize]) -> Result<TuneReport> {
    if u_range.is_empty() {
        return Err(contract("u range is empty"));
    }
    let scores = evaluate(cfg, u_range)?;
    let mut curve: Vec<CapacityReport> =
        u_range.iter().enumerate().map(|(j, &u)| report(cfg, u, scores.iter().map(|s| s[j]))).collect();
    let best = curve
        .iter()
        .enumerate()
        .fold(None::<usize>, |best, (j, r)| match best {
            Some(b) if curve[b].mv_accuracy > r.mv_accuracy => Some(b),
            Some(b) if curve[b].mv_accuracy == r.mv_accuracy && curve[b].u <= r.u => Some(b),
            _ => Some(j),
        })
        .expect("non-empty curve");
    let best_u = curve[best].u;
    curve[best].tuned_u = Some(best_u);
    Ok(TuneReport { best_u, curve })
}
