//! Quantum neurons.
//!
//! Both designs rotate by `2φ` with `φ = γθ + π/4`, where `θ = Σ_j w_ij x_j`
//! and `x_j = ±1` is read off the control qubits. The simplified neuron
//! rotates its output directly and fires with `sin²φ`. The
//! repeat-until-success neuron routes the rotation through an input qubit,
//! measures it, and conditioned on success fires with
//! `sin⁴φ / (sin⁴φ + cos⁴φ)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{contract, QhamError, Result};
use crate::simcore::{Circuit, Gate, Instruction, RusBlock, StateVector};

/// Attempts a repeat-until-success neuron makes before the shot is abandoned.
pub const DEFAULT_MAX_ATTEMPTS: u32 = 10;

/// Slack for rounding in range checks.
const ANGLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind {
    #[default]
    Simplified,
    Rus,
}

impl std::str::FromStr for ActivationKind {
    type Err = QhamError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "simplified" => Ok(ActivationKind::Simplified),
            "rus" => Ok(ActivationKind::Rus),
            other => Err(QhamError::Domain(format!("unknown neuron kind `{other}`"))),
        }
    }
}

impl std::fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ActivationKind::Simplified => "simplified",
            ActivationKind::Rus => "rus",
        })
    }
}

/// `γ = (π/4) / (w_max·n)`.
pub fn gamma(w_max: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(QhamError::Domain("γ needs n ≥ 1".into()));
    }
    if w_max == 0.0 {
        return Err(QhamError::DegenerateWeights);
    }
    if !(w_max.is_finite() && w_max > 0.0) {
        return Err(QhamError::Domain(format!("w_max = {w_max} must be positive and finite")));
    }
    Ok(FRAC_PI_4 / (w_max * n as f64))
}

/// `β = π/4 − γ·Σ_j w_ij`.
pub fn beta(weights_row: &[f64], gamma: f64) -> f64 {
    FRAC_PI_4 - gamma * weights_row.iter().sum::<f64>()
}

/// `φ = γθ + π/4`, checked against the closed interval `[0, π/2]`.
pub fn phi(theta: f64, gamma: f64) -> Result<f64> {
    let p = gamma * theta + FRAC_PI_4;
    if !(-ANGLE_TOL..=FRAC_PI_2 + ANGLE_TOL).contains(&p) {
        return Err(QhamError::NormalizationViolation { phi: p });
    }
    Ok(p.clamp(0.0, FRAC_PI_2))
}

/// Output `P(|1⟩)` of a neuron at half-angle `phi`.
pub fn activation(kind: ActivationKind, phi: f64) -> Result<f64> {
    if !(-ANGLE_TOL..=FRAC_PI_2 + ANGLE_TOL).contains(&phi) {
        return Err(QhamError::Domain(format!("φ = {phi} outside [0, π/2]")));
    }
    let (s, c) = phi.sin_cos();
    Ok(match kind {
        ActivationKind::Simplified => s * s,
        ActivationKind::Rus => rus_activation(s * s, c * c),
    })
}

/// `sin⁴ / (sin⁴ + cos⁴)` from `sin²` and `cos²`.
pub(crate) fn rus_activation(s2: f64, c2: f64) -> f64 {
    s2 * s2 / (s2 * s2 + c2 * c2)
}

/// Chance that one repeat-until-success attempt at `phi` succeeds.
pub fn rus_success_probability(phi: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    s.powi(4) + c.powi(4)
}

/// Qubit wiring and angles of one neuron update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronPlan {
    /// Data qubit that receives the result.
    pub target: usize,
    /// Output qubit, `|0⟩` on entry.
    pub ancilla: usize,
    /// Flag qubit of the repeat-until-success design, `|0⟩` on entry.
    pub rus_input: Option<usize>,
    /// `(qubit, w_ij)` in ascending qubit order.
    pub controls: Vec<(usize, f64)>,
    pub gamma: f64,
    pub beta: f64,
    pub w_max: f64,
}

impl NeuronPlan {
    /// Plan with `β` derived from the control weights. Controls are sorted by
    /// qubit index.
    pub fn new(target: usize, ancilla: usize, mut controls: Vec<(usize, f64)>, gamma: f64, w_max: f64) -> Result<Self> {
        controls.sort_by_key(|&(q, _)| q);
        let weights: Vec<f64> = controls.iter().map(|&(_, w)| w).collect();
        let plan = NeuronPlan { target, ancilla, rus_input: None, beta: beta(&weights, gamma), controls, gamma, w_max };
        plan.validate()?;
        Ok(plan)
    }

    pub fn with_rus_input(mut self, q: usize) -> Result<Self> {
        self.rus_input = Some(q);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![self.target, self.ancilla];
        seen.extend(self.rus_input);
        for &(q, w) in &self.controls {
            if !w.is_finite() || w.abs() > self.w_max * (1.0 + 1e-12) {
                return Err(contract(format!("weight {w} on control {q} exceeds w_max = {}", self.w_max)));
            }
            seen.push(q);
        }
        let mut sorted = seen.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != seen.len() {
            return Err(contract(format!("neuron qubits must be distinct: {seen:?}")));
        }
        if self.controls.windows(2).any(|w| w[0].0 > w[1].0) {
            return Err(contract("controls must be in ascending qubit order"));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) || !self.beta.is_finite() {
            return Err(contract(format!("γ = {} and β = {} must be finite, γ > 0", self.gamma, self.beta)));
        }
        Ok(())
    }

    /// Largest qubit index the plan touches.
    pub fn max_qubit(&self) -> usize {
        let mut m = self.target.max(self.ancilla).max(self.rus_input.unwrap_or(0));
        for &(q, _) in &self.controls {
            m = m.max(q);
        }
        m
    }

    /// `θ` for classical control values, `bits[q]` being the state of qubit `q`.
    pub fn theta(&self, bits: impl Fn(usize) -> bool) -> f64 {
        self.controls.iter().map(|&(q, w)| if bits(q) { w } else { -w }).sum()
    }

    /// `φ` for classical control values.
    pub fn phi(&self, bits: impl Fn(usize) -> bool) -> Result<f64> {
        // β + 2γ·Σ_{x_j=1} w_j equals γθ + π/4
        let p = self.beta
            + 2.0 * self.gamma * self.controls.iter().filter(|&&(q, _)| bits(q)).map(|&(_, w)| w).sum::<f64>();
        if !(-ANGLE_TOL..=FRAC_PI_2 + ANGLE_TOL).contains(&p) {
            return Err(QhamError::NormalizationViolation { phi: p });
        }
        Ok(p.clamp(0.0, FRAC_PI_2))
    }

    fn rotation_chain(&self, on: usize, out: &mut Vec<Gate>) {
        out.push(Gate::ry(on, 2.0 * self.beta));
        for &(q, w) in &self.controls {
            out.push(Gate::cry(q, on, 4.0 * self.gamma * w));
        }
    }

    fn rus_qubits(&self) -> Result<(usize, usize)> {
        let input = self.rus_input.ok_or_else(|| contract("repeat-until-success neuron needs an input qubit"))?;
        Ok((input, self.ancilla))
    }

    /// Gates of one attempt, before the flag measurement.
    fn rus_body(&self) -> Result<Vec<Gate>> {
        let (input, output) = self.rus_qubits()?;
        let mut body = Vec::with_capacity(2 * self.controls.len() + 4);
        self.rotation_chain(input, &mut body);
        body.push(Gate::cy(input, output));
        body.push(Gate::rz(input, FRAC_PI_2));
        for &(q, w) in self.controls.iter().rev() {
            body.push(Gate::cry(q, input, -4.0 * self.gamma * w));
        }
        body.push(Gate::ry(input, -2.0 * self.beta));
        Ok(body)
    }

    fn rus_recovery(&self) -> Result<Vec<Gate>> {
        let (input, output) = self.rus_qubits()?;
        Ok(vec![Gate::ry(output, -FRAC_PI_2), Gate::reset(input)])
    }
}

/// `Ry(2β)` on the ancilla, one `CRy(4γw_ij)` per control in ascending
/// order, then `SWAP(ancilla, target)`.
pub fn build_simplified_neuron(plan: &NeuronPlan) -> Result<Vec<Gate>> {
    plan.validate()?;
    let mut gates = Vec::with_capacity(plan.controls.len() + 2);
    plan.rotation_chain(plan.ancilla, &mut gates);
    gates.push(Gate::swap(plan.ancilla, plan.target));
    Ok(gates)
}

/// Repeat-until-success neuron: one block that retries up to `max_attempts`
/// times, then `SWAP(output, target)`.
///
/// Each attempt rotates the input qubit by `Ry(2φ)`, applies `CY` from input
/// to output and `Rz(π/2)` to the input, and undoes the rotation. Measuring
/// the input as 0 leaves the output in `cos²φ|0⟩ − sin²φ|1⟩` (normalized).
/// Measuring 1 leaves it in `Ry(π/2)|0⟩`, which the recovery rotates back
/// before resetting the input.
pub fn build_rus_neuron(plan: &NeuronPlan, max_attempts: u32) -> Result<Vec<Instruction>> {
    plan.validate()?;
    if max_attempts == 0 {
        return Err(contract("max_attempts must be at least 1"));
    }
    let (input, output) = plan.rus_qubits()?;
    Ok(vec![
        Instruction::RepeatUntilSuccess(RusBlock {
            body: plan.rus_body()?,
            flag: input,
            recovery: plan.rus_recovery()?,
            max_attempts,
        }),
        Instruction::Gate(Gate::swap(output, plan.target)),
    ])
}

/// The gate sequence of a repeat-until-success update that fails
/// `failures` times and then succeeds, without flag measurements.
pub fn build_rus_unrolled(plan: &NeuronPlan, failures: u32) -> Result<Vec<Gate>> {
    plan.validate()?;
    let (_, output) = plan.rus_qubits()?;
    let body = plan.rus_body()?;
    let recovery = plan.rus_recovery()?;
    let mut gates = Vec::new();
    for _ in 0..failures {
        gates.extend(&body);
        gates.extend(&recovery);
    }
    gates.extend(&body);
    gates.push(Gate::swap(output, plan.target));
    Ok(gates)
}

/// Exact statistics of one repeat-until-success attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RusAttempt {
    pub p_success: f64,
    /// Output `P(|1⟩)` given success.
    pub p1_given_success: f64,
}

/// Runs one attempt on a statevector with the controls set classically
/// (`bits(q)` for control `q`) and projects the flag onto success.
pub fn rus_attempt_exact(plan: &NeuronPlan, bits: impl Fn(usize) -> bool) -> Result<RusAttempt> {
    plan.validate()?;
    let (input, output) = plan.rus_qubits()?;
    let mut state = StateVector::new(plan.max_qubit() + 1)?;
    for &(q, _) in &plan.controls {
        if bits(q) {
            state.apply(&Gate::x(q))?;
        }
    }
    for g in plan.rus_body()? {
        state.apply(&g)?;
    }
    let p_success = state.project(input, false)?;
    Ok(RusAttempt { p_success, p1_given_success: state.prob_one(output)? })
}

/// Plan of the sweep neuron, with the flag left unset.
pub fn sweep_plan(phi: f64) -> Result<NeuronPlan> {
    if !(0.0..=FRAC_PI_2).contains(&phi) {
        return Err(QhamError::Domain(format!("φ = {phi} outside [0, π/2]")));
    }
    let w = (phi / FRAC_PI_4 - 1.0).clamp(-1.0, 1.0);
    NeuronPlan::new(1, 2, vec![(0, w)], gamma(1.0, 1)?, 1.0)
}

/// A stand-alone neuron realizing half-angle `phi` for the activation sweep.
///
/// Qubit 0 is a control held at `|1⟩` with weight `w = 4φ/π − 1`, so that
/// with `γ = π/4` the neuron sees `φ = γw + π/4`. The result lands on qubit
/// 1; qubit 2 is the output ancilla and qubit 3 the flag of the
/// repeat-until-success design.
pub fn sweep_neuron(kind: ActivationKind, phi: f64, max_attempts: u32) -> Result<Circuit> {
    let plan = sweep_plan(phi)?;
    let mut c = Circuit::new(if kind == ActivationKind::Rus { 4 } else { 3 }, 0);
    c.push(Gate::x(0))?;
    match kind {
        ActivationKind::Simplified => {
            c.extend(build_simplified_neuron(&plan)?)?;
        }
        ActivationKind::Rus => {
            for ins in build_rus_neuron(&plan.with_rus_input(3)?, max_attempts)? {
                c.push_instruction(ins)?;
            }
        }
    }
    Ok(c)
}
