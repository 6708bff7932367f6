use std::f64::consts::PI;

use super::BasisGate;
use crate::error::Result;
use crate::simcore::Gate;

fn ry(q: usize, angle: f64, out: &mut Vec<BasisGate>) {
    // SX·Rz(θ+π)·SX·Rz(π) equals Ry(θ) up to global phase
    out.push(BasisGate::Sx { qubit: q });
    out.push(BasisGate::Rz { qubit: q, angle: angle + PI });
    out.push(BasisGate::Sx { qubit: q });
    out.push(BasisGate::Rz { qubit: q, angle: PI });
}

fn cnot(control: usize, target: usize, out: &mut Vec<BasisGate>) {
    out.push(BasisGate::Cnot { control, target });
}

/// Lowers one unitary gate to basis gates, in application order.
///
/// Generic angles always take the full-length path: no rotation is dropped
/// or merged, even when its angle makes it trivial.
pub fn decompose_gate(gate: &Gate) -> Result<Vec<BasisGate>> {
    let mut out = Vec::with_capacity(10);
    match *gate {
        Gate::X { qubit } => out.push(BasisGate::X { qubit }),
        Gate::Sx { qubit } => out.push(BasisGate::Sx { qubit }),
        Gate::Id { qubit } => out.push(BasisGate::Id { qubit }),
        Gate::Rz { qubit, angle } => out.push(BasisGate::Rz { qubit, angle }),
        Gate::Cnot { control, target } => cnot(control, target, &mut out),
        Gate::Ry { qubit, angle } => ry(qubit, angle, &mut out),
        Gate::Cry { control, target, angle } => {
            ry(target, angle / 2.0, &mut out);
            cnot(control, target, &mut out);
            ry(target, -angle / 2.0, &mut out);
            cnot(control, target, &mut out);
        }
        Gate::Cy { control, target } => {
            out.push(BasisGate::Rz { qubit: target, angle: -PI / 2.0 });
            cnot(control, target, &mut out);
            out.push(BasisGate::Rz { qubit: target, angle: PI / 2.0 });
        }
        Gate::Swap { a, b } => {
            cnot(a, b, &mut out);
            cnot(b, a, &mut out);
            cnot(a, b, &mut out);
        }
        Gate::Measure { .. } | Gate::Reset { .. } => {
            return Err(crate::error::contract(format!("{gate} has no basis decomposition")));
        }
    }
    Ok(out)
}
