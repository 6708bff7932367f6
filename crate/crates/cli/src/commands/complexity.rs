use anyhow::Result;
use qham::neuron::ActivationKind;
use qham::qham::{
    build_rus_forced_updates, build_update_circuit, encode, hebbian, qubit_overhead, recall_layout, rus_qubit_overhead,
};
use qham::transpile::{predicted_counts_rus, predicted_counts_simplified, transpile_circuit};
use qham::{AncillaMode, Circuit, GateCounts, Pattern, ProbeState, UpdateSchedule};
use serde::Serialize;

use crate::args::{ComplexityArgs, GlobalArgs};
use crate::output::{emit, RunManifest};
use crate::UsageError;

/// Counts cover the update machinery; the `full_*` columns add the
/// encoding rotations, and `measurements` lists the final readouts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub n: u64,
    pub u: u64,
    pub f: u64,
    pub simplified_predicted_total: u64,
    pub simplified_predicted_single: u64,
    pub simplified_predicted_cnot: u64,
    pub simplified_measured_total: u64,
    pub simplified_measured_single: u64,
    pub simplified_measured_cnot: u64,
    pub rus_predicted_total: u64,
    pub rus_predicted_single: u64,
    pub rus_predicted_cnot: u64,
    pub rus_measured_total: u64,
    pub rus_measured_single: u64,
    pub rus_measured_cnot: u64,
    pub encoding_total: u64,
    pub simplified_full_total: u64,
    pub rus_full_total: u64,
    pub measurements: u64,
    pub qubits_fresh: usize,
    pub qubits_reset: usize,
    pub rus_qubits_fresh: usize,
    pub rus_qubits_reset: usize,
    pub matches: bool,
}

fn measure(n: u64, u: u64, f: u64) -> Result<ComplexityRow> {
    let nu = n as usize;
    let w = hebbian(&[Pattern::new(vec![1; nu])?])?;
    let targets: Vec<usize> = (0..u as usize).map(|k| k % nu).collect();
    let fresh = UpdateSchedule::new(targets.clone(), AncillaMode::FreshAncilla);
    let reset = UpdateSchedule::new(targets, AncillaMode::ResetReuse);

    let simplified = transpile_circuit(&build_update_circuit(&w, &fresh, ActivationKind::Simplified, 1)?)?.1;
    let rus = transpile_circuit(&build_rus_forced_updates(&w, &fresh, f as u32)?)?.1;
    let encoding = transpile_circuit(&Circuit::from_gates(nu, 0, encode(&ProbeState::new(vec![0.0; nu])?))?)?.1;
    let ps = predicted_counts_simplified(n, u)?;
    let pr = predicted_counts_rus(n, u, f)?;

    let layout = |s: &UpdateSchedule, k| recall_layout(nu, s, k).qubit_count;
    let qubits_fresh = qubit_overhead(nu, u as usize, AncillaMode::FreshAncilla);
    let qubits_reset = qubit_overhead(nu, u as usize, AncillaMode::ResetReuse);
    let rus_qubits_fresh = rus_qubit_overhead(nu, u as usize, AncillaMode::FreshAncilla);
    let rus_qubits_reset = rus_qubit_overhead(nu, u as usize, AncillaMode::ResetReuse);
    let layouts_agree = layout(&fresh, ActivationKind::Simplified) == qubits_fresh
        && layout(&reset, ActivationKind::Simplified) == qubits_reset
        && layout(&fresh, ActivationKind::Rus) == rus_qubits_fresh
        && layout(&reset, ActivationKind::Rus) == rus_qubits_reset;

    Ok(ComplexityRow {
        n,
        u,
        f,
        simplified_predicted_total: ps.total,
        simplified_predicted_single: ps.single_qubit,
        simplified_predicted_cnot: ps.cnot,
        simplified_measured_total: simplified.total,
        simplified_measured_single: simplified.single_qubit,
        simplified_measured_cnot: simplified.cnot,
        rus_predicted_total: pr.total,
        rus_predicted_single: pr.single_qubit,
        rus_predicted_cnot: pr.cnot,
        rus_measured_total: rus.total,
        rus_measured_single: rus.single_qubit,
        rus_measured_cnot: rus.cnot,
        encoding_total: encoding.total,
        simplified_full_total: (simplified + encoding).total,
        rus_full_total: (rus + encoding).total,
        measurements: n,
        qubits_fresh,
        qubits_reset,
        rus_qubits_fresh,
        rus_qubits_reset,
        matches: ps == simplified && pr == rus && layouts_agree,
    })
}

/// Builds the table; `Ok(false)` after writing it if any row disagrees.
pub fn run(global: &GlobalArgs, args: &ComplexityArgs) -> Result<bool> {
    for (name, span) in [("--n", args.n), ("--u", args.u), ("--f", args.f)] {
        if span.is_empty() {
            return Err(UsageError(format!("{name} range {span} is empty")).into());
        }
    }
    if args.n.lo < 2 || args.u.lo < 1 {
        return Err(UsageError("--n starts at 2 and --u at 1".into()).into());
    }
    let mut rows = Vec::new();
    for n in args.n.values() {
        for u in args.u.values() {
            for f in args.f.values() {
                rows.push(measure(n, u, f)?);
            }
        }
    }
    let manifest = RunManifest::new("complexity", args, global)?;
    emit(global, &manifest, &rows, &rows)?;
    let bad: Vec<&ComplexityRow> = rows.iter().filter(|r| !r.matches).collect();
    for r in &bad {
        eprintln!(
            "mismatch at n={} u={} f={}: simplified predicted {} measured {}; rus predicted {} measured {}",
            r.n,
            r.u,
            r.f,
            GateCounts::new(r.simplified_predicted_single, r.simplified_predicted_cnot),
            GateCounts::new(r.simplified_measured_single, r.simplified_measured_cnot),
            GateCounts::new(r.rus_predicted_single, r.rus_predicted_cnot),
            GateCounts::new(r.rus_measured_single, r.rus_measured_cnot),
        );
    }
    Ok(bad.is_empty())
}
