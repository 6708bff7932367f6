//! End-to-end acceptance checks. Prints one line per criterion and exits
//! nonzero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use qham::capacity::{classical_capacity, tune_u, CapacityConfig};
use qham::neuron::ActivationKind;
use qham::qham::{qubit_overhead, recall_layout, rus_qubit_overhead};
use qham::rng::substream;
use qham::simcore::{dense_unitary, gate_matrix, Circuit, Gate, StateVector};
use qham::transpile::decompose_gate;
use qham::{AncillaMode, NoiseSpec, UpdateSchedule};
use rand::Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn qham(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qham")).args(args).env_clear().output().expect("binary runs")
}

fn json(args: &[&str]) -> Result<Value, String> {
    let out = qham(args);
    if !out.status.success() {
        return Err(format!("{args:?} exited {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn f64s(v: &Value) -> Vec<f64> {
    v.as_array().expect("array").iter().map(|x| x.as_f64().expect("number")).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() < limit, || format!("took {:.1?}, limit {limit:?}", start.elapsed()))
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

const TWO_ATTRACTOR_CONFIG: &str =
    r#"{"schema_version": 1, "attractors": ["0110", "1001"], "probe": [-1, 1, 0, -1], "schedule": [2]}"#;

fn activation_exactness() -> Check {
    let start = Instant::now();
    let simplified = json(&["neuron-sweep", "--kind", "simplified", "--points", "33"])?;
    let rows = simplified["data"].as_array().unwrap();
    ensure(rows.len() == 33, || "expected 33 points".into())?;
    ensure(rows[0]["phi"] == 0.0 && rows[32]["phi"].as_f64() == Some(PI / 2.0), || "grid endpoints".into())?;
    let mut worst = 0.0f64;
    for r in rows {
        let phi = r["phi"].as_f64().unwrap();
        worst = worst.max((r["simulated_p1"].as_f64().unwrap() - phi.sin().powi(2)).abs());
    }
    ensure(worst <= 1e-9, || format!("simplified deviates by {worst:e}"))?;

    let rus = json(&["neuron-sweep", "--kind", "rus", "--points", "33"])?;
    let mut worst_rus = 0.0f64;
    for r in rus["data"].as_array().unwrap() {
        let (s, c) = r["phi"].as_f64().unwrap().sin_cos();
        let want = s.powi(4) / (s.powi(4) + c.powi(4));
        worst_rus = worst_rus.max((r["simulated_p1"].as_f64().unwrap() - want).abs());
    }
    ensure(worst_rus <= 1e-9, || format!("exact conditional marginal deviates by {worst_rus:e}"))?;

    let sampled =
        json(&["neuron-sweep", "--kind", "rus", "--points", "33", "--sampled", "--shots", "100000", "--seed", "1"])?;
    let mut worst_z = 0.0f64;
    for r in sampled["data"].as_array().unwrap() {
        let (s, c) = r["phi"].as_f64().unwrap().sin_cos();
        let p = s.powi(4) / (s.powi(4) + c.powi(4));
        let done = (r["shots"].as_u64().unwrap() - r["aborted"].as_u64().unwrap()) as f64;
        let ones = (r["simulated_p1"].as_f64().unwrap() * done).round();
        let sigma = (done * p * (1.0 - p)).sqrt();
        let dev = (ones - done * p).abs();
        if dev > 1e-9 {
            worst_z = worst_z.max(dev / sigma);
        }
    }
    ensure(worst_z <= 3.0, || format!("sampled point {worst_z:.2}σ away"))?;
    within_budget(start, Duration::from_secs(10))?;
    Ok(format!("max |Δ| {worst:.1e} / {worst_rus:.1e}, sampled max {worst_z:.2}σ, {:.1?}", start.elapsed()))
}

fn closed_form_counts() -> Check {
    let start = Instant::now();
    let out = qham(&["complexity", "--n", "2..8", "--u", "1..4", "--f", "0..2"]);
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let rows = v["data"].as_array().unwrap();
    ensure(rows.len() == 7 * 4 * 3, || format!("{} rows", rows.len()))?;
    for r in rows {
        let g = |k: &str| r[k].as_u64().unwrap() as i64;
        let (n, u, f) = (g("n"), g("u"), g("f"));
        let simplified = ((10 * n - 3) * u, (8 * n - 4) * u, (2 * n + 1) * u);
        let rus = ((20 * n * (f + 1) - 4 * f - 5) * u, (16 * n * (f + 1) - f - 5) * u, (4 * n * (f + 1) - 3 * f) * u);
        let measured_s =
            (g("simplified_measured_total"), g("simplified_measured_single"), g("simplified_measured_cnot"));
        let measured_r = (g("rus_measured_total"), g("rus_measured_single"), g("rus_measured_cnot"));
        ensure(measured_s == simplified && measured_r == rus, || format!("n={n} u={u} f={f}"))?;
    }
    within_budget(start, Duration::from_secs(5))?;
    Ok(format!("84 (n, u, f) combinations, {:.1?}", start.elapsed()))
}

fn decomposition_faithfulness() -> Check {
    let mut rng = substream(3, &[]);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let t: f64 = rng.gen_range(-2.0 * PI..2.0 * PI);
        for g in
            [Gate::ry(0, t), Gate::rz(0, t), Gate::cry(0, 1, t), Gate::cry(1, 0, t), Gate::cy(0, 1), Gate::swap(0, 1)]
        {
            let basis = decompose_gate(&g).map_err(|e| e.to_string())?;
            let c = Circuit::from_gates(2, 0, basis.into_iter().map(Gate::from)).unwrap();
            let d = dense_unitary(&c).unwrap().max_abs_diff_up_to_phase(&gate_matrix(&g, 2).unwrap());
            worst = worst.max(d);
        }
    }
    ensure(worst <= 1e-10, || format!("worst {worst:e}"))?;
    Ok(format!("600 decompositions, worst {worst:.1e}"))
}

fn random_gate<R: Rng>(q: usize, rng: &mut R) -> Gate {
    let a = rng.gen_range(0..q);
    let t = rng.gen_range(-PI..PI);
    if q > 1 && rng.gen_bool(0.4) {
        let b = (a + rng.gen_range(1..q)) % q;
        return match rng.gen_range(0..4) {
            0 => Gate::cnot(a, b),
            1 => Gate::cry(a, b, t),
            2 => Gate::cy(a, b),
            _ => Gate::swap(a, b),
        };
    }
    match rng.gen_range(0..5) {
        0 => Gate::x(a),
        1 => Gate::sx(a),
        2 => Gate::id(a),
        3 => Gate::rz(a, t),
        _ => Gate::ry(a, t),
    }
}

fn oracle_equivalence() -> Check {
    let mut rng = substream(4, &[]);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let q = rng.gen_range(1..=3);
        let len = rng.gen_range(1..=25);
        let gates: Vec<Gate> = (0..len).map(|_| random_gate(q, &mut rng)).collect();
        let mut s = StateVector::new(q).unwrap();
        for g in &gates {
            s.apply(g).unwrap();
        }
        let u = dense_unitary(&Circuit::from_gates(q, 0, gates).unwrap()).unwrap();
        for (r, a) in s.amplitudes().iter().enumerate() {
            worst = worst.max((a - u.get(r, 0)).norm());
        }
    }
    ensure(worst <= 1e-12, || format!("worst {worst:e}"))?;
    Ok(format!("200 circuits, worst {worst:.1e}"))
}

fn capacity_formula() -> Check {
    let got: Vec<f64> = [(4, 0.0), (5, 0.0), (10, 0.1)]
        .iter()
        .map(|&(n, r)| classical_capacity(n, r).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    for (g, want) in got.iter().zip([1.44, 1.55, 1.39]) {
        ensure((g - want).abs() <= 0.01, || format!("{g} vs {want}"))?;
    }
    Ok(format!("{:.4} {:.4} {:.4}", got[0], got[1], got[2]))
}

fn two_attractor_recall() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.json", TWO_ATTRACTOR_CONFIG);
    let v = json(&["recall", "--config", &cfg])?;
    let d = &v["data"];
    let p = f64s(&d["per_qubit_p1"]);
    let want = [0.0, 1.0, (7.0 * PI / 16.0).sin().powi(2), 0.0];
    for (a, b) in p.iter().zip(want) {
        ensure((a - b).abs() <= 1e-12, || format!("marginals {p:?}"))?;
    }
    ensure(d["majority_bitstring"] == "0110", || format!("vote {}", d["majority_bitstring"]))?;
    let acc = d["density_accuracy"].as_f64().unwrap();
    ensure((acc - 0.99049).abs() <= 1e-5, || format!("density {acc}"))?;
    Ok(format!("P(1) = {p:.6?}, density {acc:.6}"))
}

fn perfect_recall() -> Check {
    let start = Instant::now();
    let us: Vec<usize> = (1..=20).collect();
    let (mut notes, mut misses) = (Vec::new(), Vec::new());
    for n in 4..=10 {
        let cfg = CapacityConfig { trials: 200, shots: 1024, seed: 7, ..CapacityConfig::new(n, 1, 0.2, 0) };
        let t = tune_u(&cfg, &us).map_err(|e| e.to_string())?;
        let best = t.curve.iter().find(|r| r.u == t.best_u).unwrap();
        if n <= 5 && best.mv_accuracy != 1.0 {
            misses.push(format!("n={n} majority {}", best.mv_accuracy));
        }
        if best.density_accuracy <= 0.9 {
            misses.push(format!("n={n} density {:.4}", best.density_accuracy));
        }
        notes.push(format!("n{n}:u{}={:.3}/{:.3}", t.best_u, best.mv_accuracy, best.density_accuracy));
    }
    within_budget(start, Duration::from_secs(300))?;
    let detail = format!("majority/density at tuned u {} in {:.1?}", notes.join(" "), start.elapsed());
    ensure(misses.is_empty(), || format!("{}; {detail}", misses.join(", ")))?;
    Ok(detail)
}

fn noise_ordering() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "t.json", TWO_ATTRACTOR_CONFIG);
    let acc = |noise: &str| -> Result<f64, String> {
        let v = json(&["recall", "--config", &cfg, "--noise", noise, "--shots", "10000", "--seed", "2"])?;
        Ok(v["data"]["density_accuracy"].as_f64().unwrap())
    };
    let (clean, lima, melbourne) = (acc("none")?, acc("ibmq_lima")?, acc("ibmq_16_melbourne")?);
    ensure(melbourne < lima && lima < clean, || format!("melbourne {melbourne} lima {lima} noiseless {clean}"))?;
    ensure(lima < 1.0 && melbourne < 1.0, || "a noisy device reached 1.0".into())?;
    Ok(format!("melbourne {melbourne:.4} < lima {lima:.4} < noiseless {clean:.4}"))
}

fn tuning_shape() -> Check {
    let us: Vec<usize> = (1..=20).collect();
    let noiseless = CapacityConfig { trials: 1000, shots: 1024, ..CapacityConfig::new(10, 2, 0.2, 0) };
    let t = tune_u(&noiseless, &us).map_err(|e| e.to_string())?;
    let curve: Vec<String> = t.curve.iter().map(|r| format!("{:.3}", r.mv_accuracy)).collect();
    let interior = t.best_u > 1 && t.best_u < 20;

    // same trials and shots with and without noise
    let matched = CapacityConfig { trials: 500, shots: 128, seed: 1, ..CapacityConfig::new(10, 2, 0.2, 0) };
    let clean = tune_u(&matched, &us).map_err(|e| e.to_string())?;
    let noisy_cfg = CapacityConfig { noise: Some(NoiseSpec::for_device("ibmq_16_melbourne").unwrap()), ..matched };
    let noisy = tune_u(&noisy_cfg, &us).map_err(|e| e.to_string())?;
    let lower = noisy.best_u <= clean.best_u;

    let detail = format!(
        "noiseless argmax u={} over 1..=20 [{}]; matched argmax noiseless {} noisy {}",
        t.best_u,
        curve.join(" "),
        clean.best_u,
        noisy.best_u
    );
    ensure(interior && lower, || detail.clone())?;
    Ok(detail)
}

fn qubit_overheads() -> Check {
    for n in 1..=16usize {
        for u in 1..=16usize {
            ensure(qubit_overhead(n, u, AncillaMode::ResetReuse) == n + 1, || format!("reset n={n} u={u}"))?;
            ensure(qubit_overhead(n, u, AncillaMode::FreshAncilla) == n + u, || format!("fresh n={n} u={u}"))?;
            ensure(rus_qubit_overhead(n, u, AncillaMode::ResetReuse) == n + 2, || format!("rus reset n={n}"))?;
            ensure(rus_qubit_overhead(n, u, AncillaMode::FreshAncilla) == n + 2 * u, || format!("rus fresh n={n}"))?;
            for mode in [AncillaMode::ResetReuse, AncillaMode::FreshAncilla] {
                let s = UpdateSchedule::new(vec![0; u], mode);
                ensure(
                    recall_layout(n, &s, ActivationKind::Simplified).qubit_count == qubit_overhead(n, u, mode),
                    || format!("layout n={n} u={u} {mode:?}"),
                )?;
                ensure(
                    recall_layout(n, &s, ActivationKind::Rus).qubit_count == rus_qubit_overhead(n, u, mode),
                    || format!("rus layout n={n} u={u} {mode:?}"),
                )?;
            }
        }
    }
    ensure(qubit_overhead(4, 1, AncillaMode::FreshAncilla) == 5, || "n=4 u=1".into())?;
    Ok("256 (n, u) pairs, n=4 u=1 needs 5".into())
}

/// Output with the manifest removed: the `data` member for JSON, the lines
/// after the manifest comment for CSV.
fn payload(out: &Output, csv: bool) -> Result<String, String> {
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let text = String::from_utf8_lossy(&out.stdout);
    if csv {
        Ok(text.lines().filter(|l| !l.starts_with("# manifest:")).collect::<Vec<_>>().join("\n"))
    } else {
        let v: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        Ok(v["data"].to_string())
    }
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let recall = write_config(
        dir.path(),
        "r.json",
        r#"{"schema_version": 1, "attractors": ["011010", "110001"], "probe": [-1, 1, 1, 1, -1, 0],
            "schedule": {"random": 6}, "neuron": "rus", "max_attempts": 3}"#,
    );
    let cap = write_config(
        dir.path(),
        "c.json",
        r#"{"schema_version": 1, "n": [5, 6], "m": [1, 2], "rho": 0.2, "u": 4, "u_range": [0, 5], "trials": 12, "shots": 64}"#,
    );
    let commands: Vec<Vec<&str>> = vec![
        vec!["neuron-sweep", "--kind", "rus", "--sampled", "--points", "9", "--shots", "2000"],
        vec!["neuron-sweep", "--noise", "ibmq_lima", "--points", "5", "--shots", "500"],
        vec!["recall", "--config", &recall],
        vec!["recall", "--config", &recall, "--noise", "ibmq_athens", "--shots", "300"],
        vec!["capacity", "--config", &cap],
        vec!["tune-u", "--config", &cap, "--noise", "ibmq_16_melbourne"],
        vec!["complexity", "--n", "2..4", "--u", "1..2"],
    ];
    let mut runs = 0;
    for cmd in &commands {
        for format in ["json", "csv"] {
            let mut reference = None;
            for threads in ["1", "3", "1"] {
                let mut args = cmd.clone();
                args.extend(["--seed", "42", "--format", format, "--threads", threads]);
                let p = payload(&qham(&args), format == "csv")?;
                runs += 1;
                match &reference {
                    None => reference = Some(p),
                    Some(r) => ensure(*r == p, || format!("{args:?} differs across runs"))?,
                }
            }
        }
    }
    Ok(format!("{} commands × 2 formats, {runs} runs byte-identical", commands.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("activation exactness", activation_exactness),
        ("closed-form gate counts", closed_form_counts),
        ("decomposition faithfulness", decomposition_faithfulness),
        ("oracle equivalence", oracle_equivalence),
        ("classical capacity values", capacity_formula),
        ("two-attractor recall", two_attractor_recall),
        ("perfect recall at m = 1", perfect_recall),
        ("noise ordering", noise_ordering),
        ("tuning shape", tuning_shape),
        ("qubit overheads", qubit_overheads),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
