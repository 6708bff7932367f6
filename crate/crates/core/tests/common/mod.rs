#![allow(dead_code)]

use proptest::prelude::*;
use qham::simcore::Gate;

/// A random gate on `q` qubits, two-qubit gates only when `q ≥ 2`.
pub fn gate(q: usize) -> impl Strategy<Value = Gate> {
    let angle = -10.0..10.0f64;
    let one = (0..q, angle.clone(), 0..5u8).prop_map(|(a, t, k)| match k {
        0 => Gate::x(a),
        1 => Gate::sx(a),
        2 => Gate::id(a),
        3 => Gate::rz(a, t),
        _ => Gate::ry(a, t),
    });
    if q < 2 {
        return one.boxed();
    }
    let two = (0..q, 1..q, angle, 0..4u8).prop_map(move |(a, off, t, k)| {
        let b = (a + off) % q;
        match k {
            0 => Gate::cnot(a, b),
            1 => Gate::cry(a, b, t),
            2 => Gate::cy(a, b),
            _ => Gate::swap(a, b),
        }
    });
    prop_oneof![one, two].boxed()
}

/// A random circuit of up to `max_len` gates on 1..=`max_q` qubits.
pub fn circuit(max_q: usize, max_len: usize) -> impl Strategy<Value = (usize, Vec<Gate>)> {
    (1..=max_q).prop_flat_map(move |q| (Just(q), prop::collection::vec(gate(q), 0..=max_len)))
}

/// `|k − np| ≤ z·√(np(1−p))`, with a floor for degenerate `p`.
pub fn within_sigma(k: u64, n: u64, p: f64, z: f64) -> bool {
    let n = n as f64;
    let sigma = (n * p * (1.0 - p)).sqrt().max(1e-9);
    (k as f64 - n * p).abs() <= z * sigma + 1e-9
}
