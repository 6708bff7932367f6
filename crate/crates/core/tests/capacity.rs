use proptest::prelude::*;
use qham::capacity::{classical_capacity, max_flips, run_capacity, tune_u, CapacityConfig};
use qham::neuron::ActivationKind;
use qham::NoiseSpec;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn accuracies_are_probabilities(n in 3..9usize, m in 1..4usize, rho in 0.0..0.5f64, u in 0..6usize, seed in any::<u64>()) {
        let cfg = CapacityConfig { trials: 20, shots: 64, seed, ..CapacityConfig::new(n, m, rho, u) };
        let r = run_capacity(&cfg).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.mv_accuracy));
        prop_assert!((0.0..=1.0).contains(&r.density_accuracy));
        prop_assert!(r.rho_eff <= rho + 1e-12);
        prop_assert_eq!(r.rho_eff, max_flips(n, rho) as f64 / n as f64);
    }

    #[test]
    fn classical_capacity_falls_with_noise(n in 2..200usize, a in 0.0..0.5f64, b in 0.0..0.5f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(classical_capacity(n, hi).unwrap() <= classical_capacity(n, lo).unwrap() + 1e-12);
    }
}

#[test]
fn without_updates_the_probe_is_read_back() {
    // any flipped bit survives, so the majority vote misses whenever a flip happened
    let cfg = CapacityConfig { trials: 50, shots: 128, ..CapacityConfig::new(8, 2, 0.2, 0) };
    assert_eq!(run_capacity(&cfg).unwrap().mv_accuracy, 0.0);
    let clean = CapacityConfig { trials: 50, shots: 128, ..CapacityConfig::new(8, 2, 0.0, 0) };
    let r = run_capacity(&clean).unwrap();
    assert_eq!(r.mv_accuracy, 1.0);
    assert_eq!(r.density_accuracy, 1.0);
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let run = |threads, noisy: bool| {
        let mut cfg = CapacityConfig { trials: 12, shots: 32, seed: 5, ..CapacityConfig::new(5, 1, 0.2, 3) };
        if noisy {
            cfg.noise = Some(NoiseSpec::for_device("ibmq_lima").unwrap());
            cfg.neuron = ActivationKind::Rus;
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| tune_u(&cfg, &[0, 1, 3]).unwrap())
    };
    for noisy in [false, true] {
        assert_eq!(run(1, noisy), run(4, noisy));
    }
}

#[test]
fn one_pattern_is_always_recalled_noiselessly() {
    let cfg = CapacityConfig { trials: 100, shots: 256, seed: 2, ..CapacityConfig::new(4, 1, 0.25, 0) };
    let t = tune_u(&cfg, &(1..=8).collect::<Vec<_>>()).unwrap();
    for point in &t.curve {
        assert!(point.mv_accuracy >= 0.95, "u={} acc={}", point.u, point.mv_accuracy);
    }
}
