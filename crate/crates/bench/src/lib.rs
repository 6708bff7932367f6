//! Fixtures shared by the benchmarks.

use qham::qham::hebbian;
use qham::{AncillaMode, Pattern, ProbeState, UpdateSchedule, WeightMatrix};

/// A two-attractor network of `n` qubits with a probe one flip away from
/// the first attractor and `u` round-robin updates.
pub fn network(n: usize, u: usize, mode: AncillaMode) -> (ProbeState, WeightMatrix, UpdateSchedule) {
    let a: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
    let b: Vec<bool> = (0..n).map(|i| i % 3 == 0).collect();
    let w = hebbian(&[Pattern::from_bits(&a).unwrap(), Pattern::from_bits(&b).unwrap()]).unwrap();
    let mut probe: Vec<f64> = a.iter().map(|&x| if x { 1.0 } else { -1.0 }).collect();
    probe[0] = -probe[0];
    let schedule = UpdateSchedule::new((0..u).map(|k| k % n).collect(), mode);
    (ProbeState::new(probe).unwrap(), w, schedule)
}
