//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

#[path = "../../core/tests/support/properties.rs"]
#[allow(dead_code)]
mod props;

use std::process::Command;
use std::time::{Duration, Instant};

use cantorlab::catalog::builtin;
use cantorlab::dimension::{box_samples, hausdorff_dimension_moran, union_box_dimension};
use cantorlab::cantor::CoverConfig;
use cantorlab::setops::{cover_sum, measure_estimate, SumOp};
use cantorlab::spectra::{k_alpha, lagrange_sample, periodic_k, CFSequence, Digit, DEFAULT_WINDOW};
use cantorlab::{Interval, RegularCantorSet};
use rayon::prelude::*;
use serde_json::Value;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Runs the binary, returning the `outputs` object and the wall time.
fn cli(args: &[&str]) -> Result<(Value, Duration), String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_cantorlab"))
        .args(args)
        .env_remove("CANTORLAB_BUDGET")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if !out.status.success() {
        return Err(format!(
            "`cantorlab {}` exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    Ok((v["outputs"].clone(), elapsed))
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn ternary_dimension() -> Check {
    let d = 2f64.ln() / 3f64.ln();
    let (moran, t) = cli(&["dim", "--set", "ternary", "--method", "moran"])?;
    let err = (f(&moran["value"]) - d).abs();
    ensure(err <= 1e-9, format!("moran error {err:e}"))?;
    ensure(t < Duration::from_secs(1), format!("moran took {t:?}"))?;
    let (bx, t2) = cli(&["dim", "--set", "ternary", "--method", "box", "--min-depth", "2", "--max-depth", "10"])?;
    let berr = (f(&bx["value"]) - d).abs();
    ensure(berr <= 0.01, format!("box error {berr:e}"))?;
    ensure(t2 < Duration::from_secs(1), format!("box took {t2:?}"))?;
    Ok(format!("moran err {err:.1e}, box err {berr:.1e}, {:.2}s + {:.2}s", t.as_secs_f64(), t2.as_secs_f64()))
}

fn hall() -> Check {
    let (o, t) = cli(&["hall", "--depth", "8", "--margin", "0.001"])?;
    ensure(o["contains"] == Value::Bool(true), "target not contained")?;
    let e = f(&o["endpoint_error"]);
    ensure(e <= 1e-3, format!("endpoint error {e:e}"))?;
    ensure(t < Duration::from_secs(120), format!("took {t:?}"))?;
    Ok(format!("contains, endpoint err {e:.1e}, {:.1}s", t.as_secs_f64()))
}

fn sum_identity() -> Check {
    let k = builtin("ternary").map_err(|e| e.to_string())?;
    let close = |u: &cantorlab::IntervalUnion, lo: f64, hi: f64| {
        u.len() == 1 && (u.intervals()[0].lo - lo).abs() <= 1e-12 && (u.intervals()[0].hi - hi).abs() <= 1e-12
    };
    for n in 0..=10 {
        let s = cover_sum(&k, &k, n, SumOp::Plus, 1.0).map_err(|e| e.to_string())?;
        ensure(close(&s, 0.0, 2.0), format!("sum at depth {n}: {:?}", s.intervals()))?;
        let d = cover_sum(&k, &k, n, SumOp::Minus, 1.0).map_err(|e| e.to_string())?;
        ensure(close(&d, -1.0, 1.0), format!("difference at depth {n}: {:?}", d.intervals()))?;
    }
    Ok("[0,2] and [-1,1] at depths 0..=10".into())
}

fn thin_difference() -> Check {
    let k = builtin("thin").map_err(|e| e.to_string())?;
    let m: Vec<f64> = (0..=8)
        .map(|n| cover_sum(&k, &k, n, SumOp::Minus, 1.0).map(|u| measure_estimate(&u)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(m.windows(2).all(|w| w[1] < w[0]), format!("not strictly decreasing: {m:?}"))?;
    ensure(m[8] < 0.2, format!("depth-8 measure {}", m[8]))?;
    Ok(format!("measure {:.3} -> {:.2e} over depths 0..=8", m[0], m[8]))
}

fn affine(pieces: &[(f64, f64)]) -> RegularCantorSet {
    let iv = pieces.iter().map(|&(a, b)| Interval::new(a, b).unwrap()).collect();
    RegularCantorSet::build_affine_full(iv).unwrap()
}

fn sum_dimension() -> Check {
    // hulls of different lengths keep the first-level pieces of the sum
    // apart; equal layouts would overlap exactly and lower the dimension
    let pairs = [
        (builtin("thin").unwrap(), affine(&[(0.0, 0.045), (0.405, 0.45)])),
        (affine(&[(0.0, 0.2), (0.8, 1.0)]), affine(&[(0.0, 0.182), (0.518, 0.7)])),
        (builtin("ternary").unwrap(), builtin("ternary").unwrap()),
    ];
    let depth = 10;
    let cfg = CoverConfig::default();
    let mut notes = Vec::new();
    for (k1, k2) in &pairs {
        let d1 = hausdorff_dimension_moran(k1, 0, 1e-12).map_err(|e| e.to_string())?.value;
        let d2 = hausdorff_dimension_moran(k2, 0, 1e-12).map_err(|e| e.to_string())?.value;
        let expected = (d1 + d2).min(1.0);
        let u = cover_sum(k1, k2, depth, SumOp::Plus, 1.0).map_err(|e| e.to_string())?;
        // grid sizes from 2^-6 down to well above the depth-n interval length
        let floor = 16.0
            * (box_samples(k1, depth..=depth, &cfg).map_err(|e| e.to_string())?[0].radius
                + box_samples(k2, depth..=depth, &cfg).map_err(|e| e.to_string())?[0].radius);
        let res: Vec<f64> = (6..40).map(|k| 0.5f64.powi(k)).take_while(|&r| r >= floor).collect();
        let est = union_box_dimension(&u, &res).map_err(|e| e.to_string())?.value;
        notes.push(format!("{:.3}->{:.3}", d1 + d2, est));
        ensure((est - expected).abs() <= 0.05, format!("d1+d2 = {:.4}: estimate {est:.4}", d1 + d2))?;
    }
    Ok(notes.join(", "))
}

fn marstrand() -> Check {
    let start = Instant::now();
    let res = "6,7,8,9,10,11,12";
    let (t, _) = cli(&["marstrand", "--count", "200", "--seed", "7", "--theta", "0.1", "--resolutions", res])?;
    let frac = f(&t["fraction_above_theta"]);
    ensure(frac >= 0.9, format!("ternary fraction above 0.1: {frac}"))?;
    let (thin, _) = cli(&[
        "marstrand", "--k1", "thin", "--k2", "thin", "--depth", "6", "--count", "50", "--seed", "7", "--resolutions", res,
    ])?;
    let slopes: Vec<f64> = thin["slopes"].as_array().ok_or("no slopes")?.iter().map(f).collect();
    let min = slopes.iter().copied().fold(f64::INFINITY, f64::min);
    ensure(min >= 0.3, format!("thin slope minimum {min}"))?;
    let t = start.elapsed();
    ensure(t < Duration::from_secs(600), format!("took {t:?}"))?;
    Ok(format!("ternary fraction {frac:.3}, thin slope min {min:.3}, {:.0}s", t.as_secs_f64()))
}

fn certificates() -> Check {
    let (g, _) = cli(&["intersect", "--t", "0"])?;
    ensure(
        g["gap_lemma"]["outcome"] == "CertifiedIntersection",
        format!("gap lemma: {}", g["gap_lemma"]),
    )?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("cert.json");
    let p = path.to_str().unwrap();
    let (s, _) = cli(&["recur", "--certificate", p])?;
    ensure(s["outcome"] == "Certificate", format!("search: {}", s["outcome"]))?;
    ensure(s["members"].as_u64().unwrap_or(0) > 0, "empty certificate")?;
    ensure(s["check"]["valid"] == Value::Bool(true), "search-side check failed")?;
    let (v, t) = cli(&["recur", "--verify", p])?;
    ensure(v["check"]["valid"] == Value::Bool(true), format!("re-verification: {}", v["check"]))?;
    ensure(t < Duration::from_secs(10), format!("re-verification took {t:?}"))?;
    let (thin, _) = cli(&["recur", "--k1", "thin", "--k2", "thin"])?;
    ensure(thin["outcome"] == "NotFound", format!("thin pair: {}", thin["outcome"]))?;
    Ok(format!("{} member cells, re-verified in {:.2}s; thin NotFound", s["members"], t.as_secs_f64()))
}

fn spectrum() -> Check {
    let ones = periodic_k(&[1]).map_err(|e| e.to_string())?;
    ensure(ones.closed_form() == "√5", format!("k(1-bar) = {}", ones.closed_form()))?;
    let twos = periodic_k(&[2]).map_err(|e| e.to_string())?;
    ensure(twos.closed_form() == "2√2", format!("k(2-bar) = {}", twos.closed_form()))?;
    let sample = lagrange_sample(6, 4).map_err(|e| e.to_string())?;
    let min = sample.first().and_then(|v| v.exact.clone()).ok_or("empty sample")?;
    ensure(min == ones, format!("sample minimum {}", min.closed_form()))?;
    // every word, not just one rotation per class
    let mut words: Vec<Vec<Digit>> = Vec::new();
    for len in 1..=6u32 {
        for code in 0..4usize.pow(len) {
            words.push((0..len).map(|i| (code / 4usize.pow(i) % 4) as Digit + 1).collect());
        }
    }
    let worst = words
        .par_iter()
        .map(|w| {
            let v = k_alpha(&CFSequence::periodic(vec![], w.clone())?, DEFAULT_WINDOW)?;
            let exact = v.exact.as_ref().map_or(f64::NAN, |e| e.value());
            Ok((v.direct - v.tail).abs().max((v.tail - exact).abs()))
        })
        .collect::<Result<Vec<f64>, cantorlab::Error>>()
        .map_err(|e| e.to_string())?
        .into_iter()
        .fold(0.0, f64::max);
    ensure(worst <= 1e-9, format!("estimator gap {worst:e}"))?;
    Ok(format!("{} sequences, worst estimator gap {worst:.1e}", words.len()))
}

fn cat_map() -> Check {
    let (o, t) = cli(&["catmap", "--periods", "10"])?;
    ensure(o["unstable_eigenvalue"] == "(3+√5)/2", format!("{}", o["unstable_eigenvalue"]))?;
    ensure(o["stable_eigenvalue"] == "(3-√5)/2", format!("{}", o["stable_eigenvalue"]))?;
    ensure(o["all_counts_match"] == Value::Bool(true), "counts differ from the trace formula")?;
    ensure(o["counts"].as_array().map_or(0, |c| c.len()) == 10, "missing periods")?;
    ensure(t < Duration::from_secs(30), format!("took {t:?}"))?;
    Ok(format!("n <= 10 match, {:.2}s", t.as_secs_f64()))
}

fn standard_family() -> Check {
    let run = |lambda: &str| {
        cli(&["stdmap", "--lambda", lambda, "--orbits", "200", "--iterates", "10000", "--seed", "11"]).map(|r| r.0)
    };
    let zero = run("0")?;
    let six = run("6")?;
    let mean = f(&zero["mean_exponent"]);
    ensure(mean < 0.05, format!("lambda=0 mean exponent {mean}"))?;
    let sum = f(&zero["max_abs_sum"]).max(f(&six["max_abs_sum"]));
    ensure(sum < 1e-6, format!("exponent sum {sum:e}"))?;
    let frac = f(&six["fraction_positive"]);
    ensure(frac > 0.9, format!("lambda=6 fraction positive {frac}"))?;
    Ok(format!("mean {mean:.1e}, |sum| {sum:.1e}, fraction {frac:.3}"))
}

fn property_suites() -> Check {
    let mut failed = Vec::new();
    for (name, check) in props::ALL {
        if let Err(e) = check() {
            failed.push(format!("{name}: {e}"));
        }
    }
    ensure(failed.is_empty(), failed.join("; "))?;
    Ok(format!("{} suites x {} cases", props::ALL.len(), props::CASES))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("ternary dimension", ternary_dimension),
        ("C(4) + C(4) interval", hall),
        ("ternary sum identity", sum_identity),
        ("thin difference has measure zero", thin_difference),
        ("dimension of sums", sum_dimension),
        ("projection scan", marstrand),
        ("gap lemma and recurrent certificate", certificates),
        ("spectrum exact values", spectrum),
        ("cat map", cat_map),
        ("standard family", standard_family),
        ("property suites", property_suites),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{secs:.1}s]", i + 1),
            Err(msg) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {msg} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
