mod common;

use proptest::prelude::*;
use qham::neuron::{activation, gamma, ActivationKind};
use qham::qham::{build_update_circuit, classical_update, encode, energy, hebbian, run_recall, RecallOptions};
use qham::simcore::StateVector;
use qham::{AncillaMode, Pattern, ProbeState, UpdateSchedule};

fn patterns(max_n: usize, max_m: usize) -> impl Strategy<Value = Vec<Pattern>> {
    (2..=max_n, 1..=max_m).prop_flat_map(|(n, m)| {
        prop::collection::vec(
            prop::collection::vec(prop::bool::ANY, n).prop_map(|b| Pattern::from_bits(&b).unwrap()),
            m,
        )
    })
}

fn nondegenerate(ps: &[Pattern]) -> bool {
    hebbian(ps).unwrap().w_max() > 0.0
}

fn probe_entries(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(-1.0), Just(0.0), Just(1.0), -1.0..=1.0f64], n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hebbian_is_symmetric_with_zero_diagonal(ps in patterns(12, 12)) {
        let w = hebbian(&ps).unwrap();
        for i in 0..w.n() {
            prop_assert_eq!(w.get(i, i), 0.0);
            for j in 0..w.n() {
                prop_assert_eq!(w.get(i, j), w.get(j, i));
                prop_assert!(w.get(i, j).abs() <= 1.0);
            }
        }
    }

    #[test]
    fn encoding_inverts(x in probe_entries(6)) {
        let probe = ProbeState::new(x.clone()).unwrap();
        let mut s = StateVector::new(x.len()).unwrap();
        for g in encode(&probe) {
            s.apply(&g).unwrap();
        }
        for (q, &xi) in x.iter().enumerate() {
            let back = (2.0 * s.prob_one(q).unwrap() - 1.0).clamp(-1.0, 1.0).asin() / std::f64::consts::FRAC_PI_2;
            prop_assert!((back - xi).abs() < 1e-6, "{back} vs {xi}");
        }
    }

    #[test]
    fn classical_updates_never_raise_energy(ps in patterns(10, 4), start in any::<u64>(), order in any::<u64>()) {
        prop_assume!(nondegenerate(&ps));
        let w = hebbian(&ps).unwrap();
        let n = w.n();
        let h = vec![0.0; n];
        let mut x: Vec<f64> = (0..n).map(|i| if start >> (i % 64) & 1 == 1 { 1.0 } else { -1.0 }).collect();
        let mut e = energy(&x, &w, &h).unwrap();
        for k in 0..4 * n {
            let i = ((order >> (k % 60)) as usize + k) % n;
            x[i] = f64::from(classical_update(&x, &w, i, 0.0).unwrap());
            let next = energy(&x, &w, &h).unwrap();
            prop_assert!(next <= e + 1e-12);
            e = next;
        }
    }

    #[test]
    fn populations_match_the_statevector(ps in patterns(4, 3), seed in any::<u64>(), x in probe_entries(4)) {
        prop_assume!(nondegenerate(&ps));
        let w = hebbian(&ps).unwrap();
        let n = w.n();
        let probe = ProbeState::new(x[..n].to_vec()).unwrap();
        let mut rng = qham::rng::substream(seed, &[]);
        let schedule = UpdateSchedule::random(n, 3, AncillaMode::FreshAncilla, &mut rng);
        for kind in [ActivationKind::Simplified] {
            let c = build_update_circuit(&w, &schedule, kind, 1).unwrap();
            let mut s = StateVector::new(c.qubit_count()).unwrap();
            for g in encode(&probe) {
                s.apply(&g).unwrap();
            }
            for g in c.gates() {
                s.apply(g).unwrap();
            }
            let exact = run_recall(&probe, &w, &schedule, &RecallOptions { shots: 1, ..Default::default() }).unwrap();
            for q in 0..n {
                prop_assert!((s.prob_one(q).unwrap() - exact.per_qubit_p1[q]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn noiseless_recall_is_deterministic(ps in patterns(6, 3), seed in any::<u64>()) {
        prop_assume!(nondegenerate(&ps));
        let w = hebbian(&ps).unwrap();
        let probe = ProbeState::from(&ps[0]);
        let schedule = UpdateSchedule::new((0..w.n()).collect(), AncillaMode::ResetReuse);
        let opts = RecallOptions { shots: 256, seed, ..Default::default() };
        prop_assert_eq!(run_recall(&probe, &w, &schedule, &opts).unwrap(), run_recall(&probe, &w, &schedule, &opts).unwrap());
    }
}

/// Every update on a basis probe agrees with the closed form, and its
/// majority outcome agrees with the sign rule unless the field vanishes.
#[test]
fn single_updates_on_every_basis_probe() {
    for n in 2..=6usize {
        let mut rng = qham::rng::substream(n as u64, &[]);
        let ps = qham::capacity::gen_patterns(2, n, &mut rng).unwrap();
        let w = hebbian(&ps).unwrap();
        if w.w_max() == 0.0 {
            continue;
        }
        let g = gamma(w.w_max(), n).unwrap();
        for mask in 0..1u32 << n {
            let x: Vec<f64> = (0..n).map(|q| if mask >> q & 1 == 1 { 1.0 } else { -1.0 }).collect();
            let probe = ProbeState::new(x.clone()).unwrap();
            for i in 0..n {
                let schedule = UpdateSchedule::new(vec![i], AncillaMode::ResetReuse);
                let r = run_recall(&probe, &w, &schedule, &RecallOptions { shots: 1, ..Default::default() }).unwrap();
                let theta: f64 = (0..n).map(|j| w.get(i, j) * x[j]).sum();
                let want = activation(ActivationKind::Simplified, g * theta + std::f64::consts::FRAC_PI_4).unwrap();
                assert!((r.per_qubit_p1[i] - want).abs() < 1e-12);
                if theta.abs() > 1e-12 {
                    let classical = classical_update(&x, &w, i, 0.0).unwrap();
                    assert_eq!(r.per_qubit_p1[i] > 0.5, classical == 1, "n={n} mask={mask:b} i={i}");
                }
                for j in (0..n).filter(|&j| j != i) {
                    assert!((r.per_qubit_p1[j] - f64::from(u8::from(mask >> j & 1 == 1))).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn fresh_and_reused_ancillas_agree() {
    let a = Pattern::from_bitstring("0110").unwrap();
    let b = Pattern::from_bitstring("1001").unwrap();
    let w = hebbian(&[a, b]).unwrap();
    let probe = ProbeState::new(vec![-1.0, 1.0, 0.0, -1.0]).unwrap();
    let shots = 10_000u64;
    for targets in [vec![2, 1, 2], vec![0, 3, 2, 1]] {
        for kind in [ActivationKind::Simplified, ActivationKind::Rus] {
            let run = |mode, seed| {
                let schedule = UpdateSchedule::new(targets.clone(), mode);
                let opts = RecallOptions { shots, seed, neuron: kind, trajectories: true, ..Default::default() };
                run_recall(&probe, &w, &schedule, &opts).unwrap()
            };
            let fresh = run(AncillaMode::FreshAncilla, 1);
            let reuse = run(AncillaMode::ResetReuse, 2);
            for q in 0..4 {
                let (p, r) = (fresh.per_qubit_p1[q], reuse.per_qubit_p1[q]);
                // two independent estimates: σ of the difference is √2 times one σ
                let pooled = (p + r) / 2.0;
                let sigma = (2.0 * pooled * (1.0 - pooled) / shots as f64).sqrt();
                assert!((p - r).abs() <= 3.0 * sigma + 1e-12, "{targets:?} {kind:?} q{q}: {p} vs {r}");
            }
        }
    }
}

#[test]
fn population_rus_matches_sampled_rus() {
    let ps = [Pattern::from_bitstring("01101").unwrap(), Pattern::from_bitstring("11000").unwrap()];
    let w = hebbian(&ps).unwrap();
    let probe = ProbeState::new(vec![0.5, -1.0, 0.0, 1.0, -0.3]).unwrap();
    let schedule = UpdateSchedule::new(vec![0, 4, 2, 0], AncillaMode::ResetReuse);
    let base = RecallOptions { shots: 10_000, neuron: ActivationKind::Rus, max_attempts: 3, ..Default::default() };
    let exact = run_recall(&probe, &w, &schedule, &base).unwrap();
    let sampled = run_recall(&probe, &w, &schedule, &RecallOptions { trajectories: true, seed: 9, ..base }).unwrap();
    let completed = sampled.shots - sampled.aborted;
    for q in 0..5 {
        let ones = (sampled.per_qubit_p1[q] * completed as f64).round() as u64;
        assert!(common::within_sigma(ones, completed, exact.per_qubit_p1[q], 3.0), "q{q}");
    }
}

proptest! {
    #[test]
    fn stored_pattern_and_complement_are_classical_fixed_points(bits in prop::collection::vec(any::<bool>(), 2..12)) {
        let p = Pattern::from_bits(&bits).unwrap();
        let w = hebbian(std::slice::from_ref(&p)).unwrap();
        for sign in [1.0, -1.0] {
            let x: Vec<f64> = p.as_f64().iter().map(|v| v * sign).collect();
            for i in 0..x.len() {
                prop_assert_eq!(f64::from(classical_update(&x, &w, i, 0.0).unwrap()), x[i]);
            }
        }
    }

    #[test]
    fn classical_probes_read_back_by_majority(bits in prop::collection::vec(any::<bool>(), 2..10), seed in any::<u64>()) {
        let p = Pattern::from_bits(&bits).unwrap();
        let w = hebbian(&[p.clone(), Pattern::from_bits(&vec![true; bits.len()]).unwrap()]).unwrap();
        prop_assume!(w.w_max() > 0.0);
        let schedule = UpdateSchedule::new(vec![], AncillaMode::ResetReuse);
        for trajectories in [false, true] {
            let opts = RecallOptions { shots: 64, seed, trajectories, ..Default::default() };
            let r = run_recall(&ProbeState::from(&p), &w, &schedule, &opts).unwrap();
            let expect: Vec<u8> = bits.iter().map(|&b| u8::from(b)).collect();
            prop_assert_eq!(r.majority_vote, expect);
        }
    }
}
