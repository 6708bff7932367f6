//! Exact outcome distributions of noiseless recall.
//!
//! Every gate of a recall circuit either prepares a data qubit or touches the
//! data only as a control, and the qubit an update replaces is swapped out
//! and never read again. Basis populations of the data register therefore
//! evolve as a classical Markov chain: an update on qubit `i` forgets bit `i`
//! and redraws it with the neuron's firing probability for the other bits.
//! This holds for fresh and reused ancillas alike.

use rand::Rng;

use super::{ProbeState, WeightMatrix};
use crate::error::{contract, Result};
use crate::neuron::{rus_activation, ActivationKind, NeuronPlan};

/// Cap on the data register for the dense population table.
pub const POPULATION_MAX_QUBITS: usize = 26;

/// Joint distribution over data-register basis states.
///
/// `probs` is unnormalized once repeat-until-success updates can abandon a
/// shot; `abort_mass` holds the rest.
#[derive(Debug, Clone, PartialEq)]
pub struct Populations {
    n: usize,
    probs: Vec<f64>,
    abort_mass: f64,
}

impl Populations {
    /// Product distribution of the encoded probe.
    pub fn from_probe(probe: &ProbeState) -> Result<Self> {
        let n = probe.len();
        if n > POPULATION_MAX_QUBITS {
            return Err(crate::error::QhamError::Size(format!(
                "population table supports up to {POPULATION_MAX_QUBITS} data qubits, got {n}"
            )));
        }
        let p1 = probe.encoded_p1();
        let mut probs = vec![1.0];
        for &p in &p1 {
            // qubit i becomes bit i: the new bit is the high half
            let low: Vec<f64> = probs.iter().map(|v| v * (1.0 - p)).collect();
            let high: Vec<f64> = probs.iter().map(|v| v * p).collect();
            probs = low;
            probs.extend(high);
        }
        Ok(Populations { n, probs, abort_mass: 0.0 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Unnormalized probability of each basis index.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability that some update ran out of attempts.
    pub fn abort_probability(&self) -> f64 {
        self.abort_mass
    }

    /// Per-qubit `P(1)` conditioned on the shot completing.
    pub fn marginals(&self) -> Vec<f64> {
        let mut ones = vec![0.0; self.n];
        let mut total = 0.0;
        for (x, &p) in self.probs.iter().enumerate() {
            total += p;
            for (q, o) in ones.iter_mut().enumerate() {
                if x >> q & 1 == 1 {
                    *o += p;
                }
            }
        }
        if total <= 0.0 {
            return vec![0.0; self.n];
        }
        ones.iter().map(|o| (o / total).clamp(0.0, 1.0)).collect()
    }

    /// Applies one neuron update. Only `plan.target`, `plan.controls`,
    /// `plan.gamma` and `plan.beta` are read; control qubits must be data
    /// qubits.
    pub fn apply_update(&mut self, plan: &NeuronPlan, kind: ActivationKind, max_attempts: u32) -> Result<()> {
        let t = plan.target;
        if t >= self.n || plan.controls.iter().any(|&(q, _)| q >= self.n) {
            return Err(contract("population updates need data-qubit targets and controls"));
        }
        let tbit = 1usize << t;
        let weights: Vec<(usize, f64)> =
            plan.controls.iter().map(|&(q, w)| (1usize << q, 4.0 * plan.gamma * w)).collect();
        let mut abort = 0.0;
        for x in 0..self.probs.len() {
            if x & tbit != 0 {
                continue;
            }
            let mass = self.probs[x] + self.probs[x | tbit];
            if mass == 0.0 {
                continue;
            }
            // twice the rotation half-angle
            let two_phi = 2.0 * plan.beta + weights.iter().filter(|(b, _)| x & b != 0).map(|(_, a)| a).sum::<f64>();
            let phi = two_phi / 2.0;
            if !(-1e-12..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&phi) {
                return Err(crate::error::QhamError::NormalizationViolation { phi });
            }
            let c = two_phi.cos();
            let (s2, c2) = ((1.0 - c) / 2.0, (1.0 + c) / 2.0);
            let (keep, p1) = match kind {
                ActivationKind::Simplified => (1.0, s2),
                ActivationKind::Rus => {
                    let success = s2 * s2 + c2 * c2;
                    (1.0 - (1.0 - success).powi(max_attempts as i32), rus_activation(s2, c2))
                }
            };
            self.probs[x | tbit] = mass * keep * p1;
            self.probs[x] = mass * keep * (1.0 - p1);
            abort += mass * (1.0 - keep);
        }
        self.abort_mass += abort;
        Ok(())
    }

    /// A sampler over completed-shot outcomes; draws landing in the abort
    /// mass return `None`.
    pub fn sampler(&self) -> Sampler {
        let mut acc = 0.0;
        let cumulative = self
            .probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Sampler { cumulative, total: acc + self.abort_mass }
    }
}

/// Inverse-CDF sampling over basis indices.
#[derive(Debug, Clone)]
pub struct Sampler {
    cumulative: Vec<f64>,
    total: f64,
}

impl Sampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        let u = rng.gen::<f64>() * self.total;
        let last = *self.cumulative.last().expect("non-empty table");
        if u < last {
            return Some(self.cumulative.partition_point(|&c| c <= u));
        }
        if self.total > last {
            return None;
        }
        // rounding at the top of the running sum: take the last populated state
        (0..self.cumulative.len())
            .rev()
            .find(|&i| self.cumulative[i] > if i == 0 { 0.0 } else { self.cumulative[i - 1] })
    }
}

/// `γ` and `w_max` for a trained matrix.
pub(crate) fn weight_scale(w: &WeightMatrix) -> Result<(f64, f64)> {
    let w_max = w.w_max();
    Ok((crate::neuron::gamma(w_max, w.n())?, w_max))
}
