mod common;

use qham::noise::{ChannelFlags, LogicalGateCost};
use qham::qham::{density_accuracy, hebbian, run_recall, RecallOptions};
use qham::simcore::{sample_counts, Circuit, Gate};
use qham::{DeviceNoiseParams, NoiseSpec, Pattern, ProbeState, UpdateSchedule};

fn scaled(factor: f64) -> NoiseSpec {
    let mut d = NoiseSpec::for_device("ibmq_athens").unwrap().device;
    d.sx_err = (d.sx_err * factor).min(0.5);
    d.cnot_err = d.cnot_err.map(|e| (e * factor).min(0.5));
    d.readout_err = (d.readout_err * factor).min(0.5);
    d.t1_us /= factor.max(1e-300);
    d.t2_us /= factor.max(1e-300);
    NoiseSpec::new(d).unwrap()
}

#[test]
fn ideal_device_reproduces_noiseless_shots() {
    let c = Circuit::from_gates(
        3,
        3,
        [
            Gate::ry(0, 0.7),
            Gate::cry(0, 1, 1.9),
            Gate::cy(1, 2),
            Gate::reset(0),
            Gate::ry(0, 2.2),
            Gate::measure(0, 0),
            Gate::measure(1, 1),
            Gate::measure(2, 2),
        ],
    )
    .unwrap();
    let ideal = NoiseSpec::new(DeviceNoiseParams::ideal()).unwrap();
    assert_eq!(sample_counts(&c, 3000, 4, None).unwrap(), sample_counts(&c, 3000, 4, Some(&ideal)).unwrap());
    let off = NoiseSpec::for_device("ibmq_athens").unwrap().with_channels(ChannelFlags::none());
    assert_eq!(sample_counts(&c, 3000, 4, None).unwrap(), sample_counts(&c, 3000, 4, Some(&off)).unwrap());
}

#[test]
fn recall_degrades_as_errors_grow() {
    let a = Pattern::from_bitstring("0110").unwrap();
    let w = hebbian(&[a.clone(), Pattern::from_bitstring("1001").unwrap()]).unwrap();
    let probe = ProbeState::new(vec![-1.0, 1.0, 0.0, -1.0]).unwrap();
    let schedule = UpdateSchedule::new(vec![2, 1, 0], Default::default());
    let shots = 10_000u64;
    let acc = |noise: Option<NoiseSpec>| {
        let r =
            run_recall(&probe, &w, &schedule, &RecallOptions { shots, noise, seed: 8, ..Default::default() }).unwrap();
        density_accuracy(&r.per_qubit_p1, &a).unwrap()
    };
    let levels = [acc(None), acc(Some(scaled(1.0))), acc(Some(scaled(5.0))), acc(Some(scaled(25.0)))];
    // σ of a density estimate is at most ½/√shots per qubit
    let slack = 3.0 * 0.5 / (shots as f64).sqrt();
    for pair in levels.windows(2) {
        assert!(pair[1] <= pair[0] + slack, "{levels:?}");
    }
    assert!(levels[3] < levels[0] - 0.05, "{levels:?}");
}

#[test]
fn decomposed_cost_is_noisier_than_native_cost() {
    let c =
        Circuit::from_gates(2, 2, [Gate::ry(0, 1.0), Gate::cry(0, 1, 2.0), Gate::measure(0, 0), Gate::measure(1, 1)])
            .unwrap();
    let shots = 20_000u64;
    let clean = sample_counts(&c, shots, 1, None).unwrap();
    let tv = |spec: &NoiseSpec| {
        let noisy = sample_counts(&c, shots, 2, Some(spec)).unwrap();
        let keys: std::collections::BTreeSet<_> = clean.histogram.keys().chain(noisy.histogram.keys()).collect();
        keys.into_iter()
            .map(|k| {
                let p = clean.histogram.get(k).copied().unwrap_or(0) as f64 / shots as f64;
                let q = noisy.histogram.get(k).copied().unwrap_or(0) as f64 / shots as f64;
                (p - q).abs()
            })
            .sum::<f64>()
            / 2.0
    };
    let native = scaled(10.0).with_channels(ChannelFlags { readout: false, ..Default::default() });
    let basis = native.clone().with_logical_cost(LogicalGateCost::BasisEquivalent);
    assert!(tv(&basis) > tv(&native), "{} vs {}", tv(&basis), tv(&native));
}

#[test]
fn readout_error_alone_flips_at_its_rate() {
    let mut d = DeviceNoiseParams::ideal();
    d.readout_err = 0.1;
    let spec = NoiseSpec::new(d).unwrap();
    let c = Circuit::from_gates(1, 1, [Gate::measure(0, 0)]).unwrap();
    let counts = sample_counts(&c, 10_000, 3, Some(&spec)).unwrap();
    assert!(common::within_sigma(counts.histogram.get("1").copied().unwrap_or(0), 10_000, 0.1, 3.0));
}
