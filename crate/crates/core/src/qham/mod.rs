//! Hopfield associative memory on quantum neurons.

mod population;
mod recall;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::simcore::Gate;

pub use population::Populations;
pub use recall::{
    build_recall_circuit, build_rus_forced_updates, build_update_circuit, recall_layout, run_recall, update_plan,
    update_plans, update_segments, RecallLayout, RecallOptions, RecallResult,
};

/// A stored memory, entries ±1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Pattern(Vec<i8>);

impl TryFrom<Vec<i8>> for Pattern {
    type Error = crate::error::QhamError;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        Pattern::new(v)
    }
}

impl From<Pattern> for Vec<i8> {
    fn from(p: Pattern) -> Vec<i8> {
        p.0
    }
}

impl Pattern {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(contract("pattern must have at least one entry"));
        }
        if let Some(bad) = entries.iter().find(|&&e| e != 1 && e != -1) {
            return Err(contract(format!("pattern entries must be ±1, found {bad}")));
        }
        Ok(Pattern(entries))
    }

    /// `true ↦ +1`, `false ↦ −1`.
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        Pattern::new(bits.iter().map(|&b| if b { 1 } else { -1 }).collect())
    }

    /// Parses a `0`/`1` string, first character first.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(contract(format!("bit string has `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Pattern::from_bits(&bits)
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> Vec<bool> {
        self.0.iter().map(|&e| e == 1).collect()
    }

    pub fn bitstring(&self) -> String {
        self.0.iter().map(|&e| if e == 1 { '1' } else { '0' }).collect()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&e| e as f64).collect()
    }

    pub fn hamming(&self, other: &Pattern) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub(crate) fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }
}

/// Network input, entries in `[−1, 1]`. Zero is an even superposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbeState(Vec<f64>);

impl TryFrom<Vec<f64>> for ProbeState {
    type Error = crate::error::QhamError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProbeState::new(v)
    }
}

impl From<ProbeState> for Vec<f64> {
    fn from(p: ProbeState) -> Vec<f64> {
        p.0
    }
}

impl From<&Pattern> for ProbeState {
    fn from(p: &Pattern) -> Self {
        ProbeState(p.as_f64())
    }
}

impl ProbeState {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(contract("probe must have at least one entry"));
        }
        if let Some(bad) = entries.iter().find(|e| !(-1.0..=1.0).contains(*e)) {
            return Err(contract(format!("probe entries must lie in [−1, 1], found {bad}")));
        }
        Ok(ProbeState(entries))
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `P(|1⟩)` of each encoded qubit, `sin²(xπ/4 + π/4)`.
    pub fn encoded_p1(&self) -> Vec<f64> {
        self.0.iter().map(|&x| encode_angle(x).sin().powi(2)).collect()
    }
}

fn encode_angle(x: f64) -> f64 {
    x * std::f64::consts::FRAC_PI_4 + std::f64::consts::FRAC_PI_4
}

/// Symmetric interaction matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct WeightMatrix {
    n: usize,
    w: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for WeightMatrix {
    type Error = crate::error::QhamError;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        WeightMatrix::from_rows(rows)
    }
}

impl From<WeightMatrix> for Vec<Vec<f64>> {
    fn from(m: WeightMatrix) -> Self {
        (0..m.n).map(|i| m.row(i).to_vec()).collect()
    }
}

impl WeightMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(contract("weight matrix must be square and non-empty"));
        }
        let w: Vec<f64> = rows.into_iter().flatten().collect();
        for i in 0..n {
            if w[i * n + i] != 0.0 {
                return Err(contract(format!("w[{i}][{i}] must be 0")));
            }
            for j in 0..i {
                let (a, b) = (w[i * n + j], w[j * n + i]);
                if !a.is_finite() || (a - b).abs() > 1e-12 {
                    return Err(contract(format!("w[{i}][{j}] = {a} but w[{j}][{i}] = {b}")));
                }
            }
        }
        Ok(WeightMatrix { n, w })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.w[i * self.n..(i + 1) * self.n]
    }

    /// `max_{i≠j} |w_ij|`.
    pub fn w_max(&self) -> f64 {
        self.w.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `w_ij = (1/m)·Σ_μ ε_i^μ ε_j^μ` off the diagonal.
pub fn hebbian(patterns: &[Pattern]) -> Result<WeightMatrix> {
    let first = patterns.first().ok_or_else(|| contract("hebbian needs at least one pattern"))?;
    let n = first.len();
    if patterns.iter().any(|p| p.len() != n) {
        return Err(contract("patterns have different lengths"));
    }
    let m = patterns.len() as f64;
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            let s: i64 = patterns.iter().map(|p| (p.0[i] * p.0[j]) as i64).sum();
            w[i * n + j] = s as f64 / m;
            w[j * n + i] = w[i * n + j];
        }
    }
    Ok(WeightMatrix { n, w })
}

/// One `Ry(2·(xπ/4 + π/4))` per qubit, qubit `i` taking entry `i`.
pub fn encode(probe: &ProbeState) -> Vec<Gate> {
    probe.0.iter().enumerate().map(|(i, &x)| Gate::ry(i, 2.0 * encode_angle(x))).collect()
}

fn check_dims(x: &[f64], w: &WeightMatrix) -> Result<()> {
    if x.len() != w.n {
        return Err(contract(format!("state has {} entries, weights are {}×{}", x.len(), w.n, w.n)));
    }
    Ok(())
}

/// `+1` if `Σ_j w_ij x_j > h_i`, else `−1`.
pub fn classical_update(x: &[f64], w: &WeightMatrix, i: usize, h_i: f64) -> Result<i8> {
    check_dims(x, w)?;
    if i >= w.n {
        return Err(contract(format!("neuron {i} out of range")));
    }
    let theta: f64 = w.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
    Ok(if theta > h_i { 1 } else { -1 })
}

/// `E = −½·Σ_ij w_ij x_i x_j + Σ_i h_i x_i`.
pub fn energy(x: &[f64], w: &WeightMatrix, h: &[f64]) -> Result<f64> {
    check_dims(x, w)?;
    if h.len() != w.n {
        return Err(contract("threshold vector has the wrong length"));
    }
    let mut e = 0.0;
    for i in 0..w.n {
        for j in 0..w.n {
            e -= 0.5 * w.get(i, j) * x[i] * x[j];
        }
        e += h[i] * x[i];
    }
    Ok(e)
}

/// Bit `i` is 1 iff more than half of `shots` measured it as 1. A tie is 0.
pub fn majority_vote(ones: &[u64], shots: u64) -> Result<Vec<u8>> {
    if shots == 0 {
        return Err(contract("majority vote needs at least one shot"));
    }
    Ok(ones.iter().map(|&k| u8::from(2 * k > shots)).collect())
}

/// Mean probability of reading each qubit in its target state.
pub fn density_accuracy(per_qubit_p1: &[f64], target: &Pattern) -> Result<f64> {
    if per_qubit_p1.len() != target.len() {
        return Err(contract("probability and target lengths differ"));
    }
    let sum: f64 = per_qubit_p1.iter().zip(target.entries()).map(|(&p, &t)| if t == 1 { p } else { 1.0 - p }).sum();
    Ok(sum / target.len() as f64)
}

/// Where each update's ancilla comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaMode {
    /// A new `|0⟩` ancilla per update.
    FreshAncilla,
    /// One ancilla, reset after every update.
    #[default]
    ResetReuse,
}

/// Qubits a recall needs with simplified neurons.
pub fn qubit_overhead(n: usize, u: usize, mode: AncillaMode) -> usize {
    match mode {
        AncillaMode::ResetReuse => n + 1,
        AncillaMode::FreshAncilla => n + u,
    }
}

/// Qubits a recall needs with repeat-until-success neurons, which also use
/// a flag qubit per update.
pub fn rus_qubit_overhead(n: usize, u: usize, mode: AncillaMode) -> usize {
    match mode {
        AncillaMode::ResetReuse => n + 2,
        AncillaMode::FreshAncilla => n + 2 * u,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct UpdateSchedule {
    pub targets: Vec<usize>,
    #[serde(default)]
    pub ancilla_mode: AncillaMode,
}

impl UpdateSchedule {
    pub fn new(targets: Vec<usize>, ancilla_mode: AncillaMode) -> Self {
        UpdateSchedule { targets, ancilla_mode }
    }

    /// `u` targets drawn uniformly with replacement from `0..n`.
    pub fn random<R: Rng + ?Sized>(n: usize, u: usize, ancilla_mode: AncillaMode, rng: &mut R) -> Self {
        UpdateSchedule { targets: (0..u).map(|_| rng.gen_range(0..n)).collect(), ancilla_mode }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if let Some(&t) = self.targets.iter().find(|&&t| t >= n) {
            return Err(contract(format!("update target {t} outside {n} data qubits")));
        }
        Ok(())
    }
}
