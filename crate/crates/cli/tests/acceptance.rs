//! End-to-end acceptance criteria. Every check drives the built binary and
//! reads only the files it writes. One PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use tempfile::TempDir;

type Outcome = Result<String, String>;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_thermolimit")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Result<i32, String> {
    let output = Command::new(bin())
        .arg("run")
        .arg("--config")
        .arg(config)
        .arg("--out-dir")
        .arg(out)
        .args(extra)
        .output()
        .map_err(|e| format!("cannot start binary: {e}"))?;
    output.status.code().ok_or_else(|| "terminated by signal".into())
}

fn run_ok(config: &Path, out: &Path) -> Result<(), String> {
    match run(config, out, &[])? {
        0 => Ok(()),
        code => Err(format!("{} exited {code}", config.display())),
    }
}

fn write_config(dir: &Path, name: &str, text: &str) -> Result<PathBuf, String> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| e.to_string())?;
    Ok(path)
}

/// A CSV file as named columns of raw strings.
struct Csv {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Result<Self, String> {
        let mut r = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let headers = r.headers().map_err(|e| e.to_string())?.iter().map(String::from).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|r| r.iter().map(String::from).collect()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        Ok(Self { headers, rows })
    }

    fn col(&self, name: &str) -> Result<Vec<&str>, String> {
        let k = self.headers.iter().position(|h| h == name).ok_or_else(|| format!("missing column {name}"))?;
        Ok(self.rows.iter().map(|r| r[k].as_str()).collect())
    }

    fn reals(&self, name: &str) -> Result<Vec<f64>, String> {
        self.col(name)?.into_iter().map(|s| s.parse::<f64>().map_err(|_| format!("{name}: bad number {s:?}"))).collect()
    }

    fn all_pass(&self) -> Result<(), String> {
        let failing = self.col("pass")?.iter().filter(|v| **v != "true").count();
        if failing == 0 {
            Ok(())
        } else {
            Err(format!("{failing} row(s) flagged as failing"))
        }
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn max_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn c1_extensivity(tmp: &Path) -> Outcome {
    run_ok(&configs().join("theorem1-scaling.json"), &tmp.join("c1"))?;
    let t = Csv::read(&tmp.join("c1/theorem1-scaling-oracle.csv"))?;
    t.all_pass()?;
    let err = max_of(&t.reals("abs_error")?);
    ensure(err <= 1e-10, || format!("max |factorized - brute force| = {err:e}"))?;
    let mut times: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for (label, time) in t.col("ensemble")?.into_iter().zip(t.col("t")?) {
        times.entry(label).or_default().insert(time.to_string());
    }
    ensure(times.values().all(|s| s.len() == 16), || "every ensemble needs 16 time points".into())?;
    let dims = t.reals("dim")?;
    let largest = max_of(&dims);
    ensure(largest <= 4096.0, || format!("dimension {largest} above the cap"))?;
    Ok(format!("{} ensembles up to dim {largest}, max error {err:.1e}", times.len()))
}

fn c2_scaling(tmp: &Path) -> Outcome {
    let cfg = write_config(
        tmp,
        "c2.json",
        r#"{"experiment": "theorem1-scaling",
            "parameters": {"theorem1": {"oracle_sizes": [], "random_ensembles": 0}}}"#,
    )?;
    run_ok(&cfg, &tmp.join("c2"))?;
    let t = Csv::read(&tmp.join("c2/theorem1-scaling-scaling.csv"))?;
    t.all_pass()?;
    let n = t.reals("n")?;
    let expected: Vec<f64> = (0..7).map(|k| 10f64.powi(k)).collect();
    ensure(n == expected, || format!("n column {n:?}"))?;
    let sv = t.reals("slope_sqrt_variance")?[0];
    let sr = t.reals("slope_ratio")?[0];
    ensure((sv - 0.5).abs() <= 1e-9, || format!("sqrt-variance slope {sv}"))?;
    ensure((sr + 0.5).abs() <= 1e-9, || format!("ratio slope {sr}"))?;
    // Independent fit from the emitted columns.
    let xs: Vec<f64> = n.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = t.reals("sqrt_variance")?.iter().map(|v| v.ln()).collect();
    let fit = slope(&xs, &ys);
    ensure((fit - 0.5).abs() <= 1e-9, || format!("refit slope {fit}"))?;
    Ok(format!("slopes {sv:.12} / {sr:.12}"))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn theorem2(tmp: &Path) -> Result<PathBuf, String> {
    let out = tmp.join("t2");
    if !out.exists() {
        run_ok(&configs().join("theorem2-decoherence.json"), &out)?;
    }
    Ok(out)
}

fn c3_commuting(tmp: &Path) -> Outcome {
    let t = Csv::read(&theorem2(tmp)?.join("theorem2-decoherence-commuting.csv"))?;
    t.all_pass()?;
    let gs: BTreeSet<&str> = t.col("g")?.into_iter().collect();
    ensure(gs.len() == 3 && t.rows.len() == 96, || format!("{} couplings, {} rows", gs.len(), t.rows.len()))?;
    let worst = max_of(&t.reals("trace_distance")?);
    ensure(worst <= 1e-10, || format!("trace distance {worst:e}"))?;
    Ok(format!("max trace distance {worst:.1e}"))
}

fn c4_convergence(tmp: &Path) -> Outcome {
    let dir = theorem2(tmp)?;
    let t = Csv::read(&dir.join("theorem2-decoherence-convergence.csv"))?;
    t.all_pass()?;
    let g = t.reals("g")?;
    ensure(g == [5.0, 20.0, 80.0], || format!("coupling ladder {g:?}"))?;
    // Recompute the maxima from the per-time table.
    let d = Csv::read(&dir.join("theorem2-decoherence-decoherence.csv"))?;
    let mut maxima = vec![0.0f64; 3];
    for (gv, td) in d.reals("g")?.into_iter().zip(d.reals("trace_distance")?) {
        let k = g.iter().position(|x| *x == gv).ok_or("unexpected coupling")?;
        maxima[k] = maxima[k].max(td);
    }
    ensure(maxima == t.reals("max_trace_distance")?, || "maxima disagree with the per-time table".into())?;
    ensure(maxima.windows(2).all(|w| w[1] <= w[0]), || format!("not non-increasing: {maxima:?}"))?;
    ensure(maxima[2] <= 0.25 * maxima[0], || format!("ratio {}", maxima[2] / maxima[0]))?;
    Ok(format!("max trace distance {:.3e} -> {:.3e} -> {:.3e}", maxima[0], maxima[1], maxima[2]))
}

fn c5_averaging(tmp: &Path) -> Outcome {
    let dir = theorem2(tmp)?;
    let t = Csv::read(&dir.join("theorem2-decoherence-averaging.csv"))?;
    t.all_pass()?;
    let d = Csv::read(&dir.join("theorem2-decoherence-decoherence.csv"))?;
    let tau = d.reals("g")?.iter().zip(d.reals("tau_m")?).find(|(g, _)| **g == 5.0).map(|(_, t)| t);
    let tau = tau.ok_or("no tau_m for g = 5")?;
    let omega = t.reals("omega")?;
    let window = t.reals("window")?;
    let initial = t.reals("initial_magnitude")?;
    let averaged = t.reals("averaged_magnitude")?;
    let bound = t.reals("bound")?;
    let omega_min = omega.iter().map(|w| w.abs()).fold(f64::INFINITY, f64::min);
    let samples = 20001.0;
    let mut worst = 0.0f64;
    for k in 0..omega.len() {
        let big_t = window[k];
        ensure(rel(big_t, 50.0 * tau) <= 1e-12, || format!("window {big_t} is not 50 tau_M"))?;
        let w = omega[k].abs();
        let closed = initial[k] * 2.0 * (0.5 * w * big_t).sin().abs() / (w * big_t);
        let dt = big_t / (samples - 1.0);
        let slack = initial[k] * dt * dt * w * w / 12.0;
        let limit = initial[k] * 2.0 / (omega_min * big_t) + slack;
        ensure(rel(bound[k], limit) <= 1e-12, || format!("bound column {} vs {limit}", bound[k]))?;
        ensure(averaged[k] <= limit, || format!("averaged {} above bound {limit}", averaged[k]))?;
        worst = worst.max((averaged[k] - closed).abs());
    }
    ensure(worst <= 1e-6, || format!("closed-form error {worst:e}"))?;
    Ok(format!("{} coherence(s), closed-form error {worst:.1e}", omega.len()))
}

fn c6_fidelity(tmp: &Path) -> Outcome {
    run_ok(&configs().join("theorem3-cat.json"), &tmp.join("c6"))?;
    let t = Csv::read(&tmp.join("c6/theorem3-cat-fidelity.csv"))?;
    t.all_pass()?;
    let ns: BTreeSet<&str> = t.col("n")?.into_iter().collect();
    ensure(ns == ["1", "2", "4", "8"].into_iter().collect(), || format!("sizes {ns:?}"))?;
    let times = t.reals("t")?;
    ensure(times.len() == 64, || format!("{} rows", times.len()))?;
    ensure(times[0] == 0.0 && rel(times[15], 4.0 * PI) <= 1e-15, || "time grid is not [0, 4π]".into())?;
    let worst = t.reals("overlap_analytic_vs_brute")?.into_iter().fold(f64::INFINITY, f64::min);
    ensure(worst >= 1.0 - 1e-6, || format!("min overlap {worst}"))?;
    Ok(format!("min overlap 1 - {:.1e}", 1.0 - worst))
}

fn c7_homogeneity(tmp: &Path) -> Outcome {
    let cfg = write_config(
        tmp,
        "c7.json",
        r#"{"experiment": "theorem3-cat",
            "parameters": {"theorem3": {"n_values": [1], "times": {"start": 0, "end": 1, "count": 2}}}}"#,
    )?;
    run_ok(&cfg, &tmp.join("c7"))?;
    let t = Csv::read(&tmp.join("c7/theorem3-cat-homogeneity.csv"))?;
    t.all_pass()?;
    ensure(t.reals("n")? == [10.0, 20.0, 40.0], || "sizes are not 10, 20, 40".into())?;
    ensure(t.reals("t")?.iter().all(|&x| x == 1.0), || "t is not 1".into())?;
    let gap = t.reals("phase_gap")?;
    let sep = t.reals("separation_ratio")?;
    let mut worst = 0.0f64;
    for k in 1..gap.len() {
        worst = worst.max(rel(gap[k] / gap[k - 1], 2.0)).max(rel(sep[k] / sep[k - 1], 0.5));
    }
    ensure(worst <= 1e-12, || format!("relative error {worst:e}"))?;
    Ok(format!("relative error {worst:.1e}"))
}

/// Ideal cat `𝒩(|a⟩ + |b⟩)` at `λ = (x + ip)/√2`.
fn cat_wigner_oracle(a: Complex64, b: Complex64, x: f64, p: f64) -> f64 {
    let lambda = Complex64::new(x, p) / 2f64.sqrt();
    let overlap = |u: Complex64, v: Complex64| (-(u.norm_sqr() + v.norm_sqr()) / 2.0 + u.conj() * v).exp();
    let diag = |c: Complex64| (-2.0 * (lambda - c).norm_sqr()).exp();
    let cross = overlap(b, a) * (-2.0 * (lambda.conj() - b.conj()) * (lambda - a)).exp();
    let n2 = 1.0 / (2.0 + 2.0 * overlap(a, b).re);
    n2 / PI * (diag(a) + diag(b) + 2.0 * cross.re)
}

fn c8_wigner(tmp: &Path) -> Outcome {
    run_ok(&configs().join("validate-all.json"), &tmp.join("c8v"))?;
    let v = Csv::read(&tmp.join("c8v/validate-all-checks.csv"))?;
    let k = v.col("check")?.iter().position(|c| *c == "vacuum_peak_error").ok_or("no vacuum check")?;
    let vacuum = v.reals("value")?[k];
    ensure(vacuum <= 1e-6, || format!("vacuum peak error {vacuum:e}"))?;

    run_ok(&configs().join("theorem3-wigner.json"), &tmp.join("c8"))?;
    let t = Csv::read(&tmp.join("c8/theorem3-cat-wigner.csv"))?;
    let (x, p, w) = (t.reals("x")?, t.reals("p")?, t.reals("w")?);
    let xs: BTreeSet<u64> = x.iter().map(|v| v.to_bits()).collect();
    let ps: BTreeSet<u64> = p.iter().map(|v| v.to_bits()).collect();
    let dx = (max_of(&x) - x.iter().copied().fold(f64::INFINITY, f64::min)) / (xs.len() - 1) as f64;
    let dp = (max_of(&p) - p.iter().copied().fold(f64::INFINITY, f64::min)) / (ps.len() - 1) as f64;
    let norm = w.iter().sum::<f64>() * dx * dp;
    ensure((norm - 1.0).abs() <= 1e-3, || format!("grid normalization {norm}"))?;

    // α = 2, φ = π/2: branches at ±2i, so the fringe axis is p = 0.
    let (a, b) = (Complex64::new(0.0, 2.0), Complex64::new(0.0, -2.0));
    let axis: Vec<(f64, f64, f64)> = (0..w.len()).filter(|&k| p[k].abs() < 1e-9).map(|k| (x[k], p[k], w[k])).collect();
    ensure(axis.len() > 100, || format!("{} points on the fringe axis", axis.len()))?;
    let peak = axis.iter().map(|&(x, p, _)| cat_wigner_oracle(a, b, x, p).abs()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for &(x, p, w) in &axis {
        let ideal = cat_wigner_oracle(a, b, x, p);
        worst = worst.max((w - ideal).abs() / ideal.abs().max(0.01 * peak));
    }
    ensure(worst <= 0.02, || format!("fringe mismatch {:.2}%", 100.0 * worst))?;
    Ok(format!("vacuum {vacuum:.1e}, normalization {norm:.6}, fringe mismatch {worst:.1e}"))
}

fn c9_regularize(tmp: &Path) -> Outcome {
    let dir = tmp.join("c9");
    run_ok(&configs().join("validate-all.json"), &dir)?;
    let v = Csv::read(&dir.join("validate-all-checks.csv"))?;
    let rows: BTreeMap<&str, (f64, &str)> =
        v.col("check")?.into_iter().zip(v.reals("value")?).zip(v.col("pass")?).map(|((c, x), p)| (c, (x, p))).collect();
    let get = |name: &str| rows.get(name).copied().ok_or_else(|| format!("missing check {name}"));
    let (closed, _) = get("cesaro_grid_closed_form_error")?;
    let (excess, _) = get("cesaro_grid_bound_excess")?;
    let (abel, _) = get("abel_linear_decay_slope_error")?;
    ensure(closed <= 1e-10, || format!("Cesàro closed-form error {closed:e}"))?;
    ensure(excess <= 0.0, || format!("Dirichlet bound exceeded by {excess:e}"))?;
    ensure(abel <= 1e-3, || format!("Abel decay slope off by {abel:e}"))?;
    for name in ["cesaro_grid_closed_form_error", "cesaro_grid_bound_excess", "abel_linear_decay_slope_error"] {
        ensure(get(name)?.1 == "true", || format!("{name} flagged"))?;
    }
    Ok(format!("closed form {closed:.1e}, Abel slope error {abel:.1e}"))
}

fn sidecar_without_clock(path: &Path) -> Result<serde_json::Value, String> {
    let mut v: serde_json::Value =
        serde_json::from_slice(&fs::read(path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    v.as_object_mut().ok_or("sidecar is not an object")?.remove("wall_clock_seconds");
    Ok(v)
}

fn c10_determinism(tmp: &Path) -> Outcome {
    let cfg = configs().join("validate-all.json");
    for dir in ["c10a", "c10b"] {
        match run(&cfg, &tmp.join(dir), &["--seed", "11"])? {
            0 => {}
            code => return Err(format!("run exited {code}")),
        }
    }
    let mut names: Vec<_> =
        fs::read_dir(tmp.join("c10a")).map_err(|e| e.to_string())?.map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for name in &names {
        let (a, b) = (tmp.join("c10a").join(name), tmp.join("c10b").join(name));
        if name.to_string_lossy().ends_with(".meta.json") {
            ensure(sidecar_without_clock(&a)? == sidecar_without_clock(&b)?, || format!("{name:?} differs"))?;
        } else {
            ensure(fs::read(&a).ok() == fs::read(&b).ok(), || format!("{name:?} differs"))?;
        }
    }

    let bad = write_config(tmp, "bad.json", r#"{"experiment": "theorem1-scaling", "parameters": {"#)?;
    let out = tmp.join("c10-bad");
    let code = run(&bad, &out, &[])?;
    ensure(code == 2, || format!("malformed config exited {code}"))?;
    ensure(!out.exists(), || "malformed config left an output directory".into())?;

    let invalid = write_config(
        tmp,
        "invalid.json",
        r#"{"experiment": "theorem1-scaling", "parameters": {"theorem1": {"n_values": [0, 10]}}}"#,
    )?;
    let out = tmp.join("c10-invalid");
    let code = run(&invalid, &out, &[])?;
    ensure(code == 2, || format!("invalid config exited {code}"))?;
    ensure(!out.exists(), || "invalid config left an output directory".into())?;
    Ok(format!("{} files identical, invalid configs exit 2 with no output", names.len()))
}

fn main() {
    type Criterion = fn(&Path) -> Outcome;
    let criteria: [(u32, &str, Criterion, u64); 10] = [
        (1, "factorized vs brute-force collective stats", c1_extensivity, 60),
        (2, "sqrt(N) fluctuation scaling", c2_scaling, 5),
        (3, "commuting-case exactness", c3_commuting, 30),
        (4, "strong-coupling convergence", c4_convergence, 120),
        (5, "decoherence-time averaging bound", c5_averaging, 10),
        (6, "cat analytic vs brute-force fidelity", c6_fidelity, 120),
        (7, "large-N homogeneities", c7_homogeneity, 1),
        (8, "Wigner function checks", c8_wigner, 60),
        (9, "regularization bounds", c9_regularize, 5),
        (10, "CLI determinism and fail-fast", c10_determinism, 10),
    ];
    let tmp = TempDir::new().expect("temporary directory");
    let mut failed = 0;
    for (id, name, check, limit) in criteria {
        let start = Instant::now();
        let result = check(tmp.path());
        let elapsed = start.elapsed();
        let result = result.and_then(|detail| {
            if elapsed <= Duration::from_secs(limit) {
                Ok(detail)
            } else {
                Err(format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64()))
            }
        });
        match result {
            Ok(detail) => println!("criterion {id:>2} PASS [{:>6.2}s] {name}: {detail}", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("criterion {id:>2} FAIL [{:>6.2}s] {name}: {why}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        std::process::exit(1);
    }
}
