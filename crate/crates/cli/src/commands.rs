//! One function per subcommand. Each resolves its parameters through
//! [`Ctx`] and returns the JSON outputs plus optional CSV text.

use std::path::PathBuf;

use cantorlab::catalog::{box_csv, list_builtin_sets, builtin};
use cantorlab::cantor::refine_with;
use cantorlab::dimension::{
    box_samples, estimate_from_samples, hausdorff_dimension_moran_with, thickness_with,
};
use cantorlab::dynamics::{
    cat_map_check_with, critical_contraction, horseshoe_report, standard_family_lyapunov, AffineHorseshoe,
};
use cantorlab::intersect::{
    d_stable_probe, difference_scan, gap_lemma_report, linspace, overlap_trace, palis_probe,
    recurrent_compact_search_with, tangency_density_experiment, verify_certificate, Certificate, PositionGrid,
    RecurrentOutcome, Side,
};
use cantorlab::setops::{
    cover_sum_balanced, cover_sum_depths, log_uniform_lambdas, marstrand_scan, measure_estimate, SumConfig, SumOp,
    DEFAULT_THETA,
};
use cantorlab::spectra::{hall_halfline_probe, k_alpha, lagrange_sample_with, CFSequence, Digit, SpectrumValue};
use cantorlab::{CoverConfig, Interval, IntervalUnion, RegularCantorSet};
use clap::Args;
use serde_json::{json, Value};

use crate::ctx::{read_file, write_file, CliError, CliResult, Ctx};
use crate::Command;

pub struct Output {
    pub json: Value,
    pub csv: Option<String>,
}

fn out(json: Value) -> Output {
    Output { json, csv: None }
}

fn with_csv(json: Value, csv: String) -> Output {
    Output { json, csv: Some(csv) }
}

fn cover_cfg(ctx: &Ctx) -> CoverConfig {
    let mut c = CoverConfig::default();
    if let Some(b) = ctx.budget {
        c.budget = b.min(usize::MAX as u64) as usize;
    }
    c
}

fn sum_cfg(ctx: &Ctx) -> SumConfig {
    let mut c = SumConfig {
        cover: cover_cfg(ctx),
        ..SumConfig::default()
    };
    if let Some(b) = ctx.budget {
        c.pair_budget = b;
    }
    c
}

pub fn dispatch(cmd: Command, ctx: &mut Ctx) -> CliResult<Output> {
    match cmd {
        Command::Dim(a) => dim(a, ctx),
        Command::Thickness(a) => thickness(a, ctx),
        Command::Sum(a) => sum(a, SumOp::Plus, ctx),
        Command::Diff(a) => sum(a, SumOp::Minus, ctx),
        Command::Hall(a) => hall(a, ctx),
        Command::Marstrand(a) => marstrand(a, ctx),
        Command::Intersect(a) => intersect(a, ctx),
        Command::Recur(a) => recur(a, ctx),
        Command::Dstable(a) => dstable(a, ctx),
        Command::Density(a) => density(a, ctx),
        Command::Spectrum(a) => spectrum(a, ctx),
        Command::Halfline(a) => halfline(a, ctx),
        Command::Horseshoe(a) => horseshoe(a, ctx),
        Command::Catmap(a) => catmap(a, ctx),
        Command::Stdmap(a) => stdmap(a, ctx),
        Command::List => list(),
        Command::Run { .. } => Err(CliError::Config("nested run".into())),
    }
}

#[derive(Args, Debug)]
pub struct DimArgs {
    /// Built-in name or definition file.
    #[arg(long)]
    set: Option<String>,
    /// `moran` or `box`.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// Cover depth for the Moran root.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    min_depth: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
}

fn dim(a: DimArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let k = ctx.set("set", a.set, "ternary")?;
    let method = ctx.get("method", a.method, "moran".into())?;
    let cfg = cover_cfg(ctx);
    match method.as_str() {
        "moran" => {
            let tol = ctx.get("tol", a.tol, 1e-9)?;
            let depth = ctx.get("depth", a.depth, 8)?;
            let e = hausdorff_dimension_moran_with(&k, depth, tol, &cfg)?;
            Ok(out(json!(e)))
        }
        "box" => {
            let lo = ctx.get("min_depth", a.min_depth, 2)?;
            let hi = ctx.get("max_depth", a.max_depth, 10)?;
            if lo >= hi {
                return Err(CliError::Config("need min_depth < max_depth".into()));
            }
            let samples = box_samples(&k, lo..=hi, &cfg)?;
            let e = estimate_from_samples(&samples)?;
            Ok(with_csv(json!(e), box_csv(&samples)))
        }
        m => Err(CliError::Config(format!("unknown method '{m}' (moran or box)"))),
    }
}

#[derive(Args, Debug)]
pub struct ThicknessArgs {
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
}

fn thickness(a: ThicknessArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let k = ctx.set("set", a.set, "ternary")?;
    let depth = ctx.get("depth", a.depth, 8)?;
    Ok(out(json!(thickness_with(&k, depth, &cover_cfg(ctx))?)))
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct SumArgs {
    #[arg(long)]
    k1: Option<String>,
    #[arg(long)]
    k2: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    /// Pick K2's depth so that scaled interval lengths match.
    #[arg(long)]
    balanced: bool,
    /// `lo,hi`: test whether one component contains it.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    target: Option<Vec<f64>>,
    #[arg(long)]
    margin: Option<f64>,
}

fn union_csv(u: &IntervalUnion) -> String {
    let mut s = String::from("lo,hi\n");
    for iv in u.intervals() {
        s.push_str(&format!("{:e},{:e}\n", iv.lo, iv.hi));
    }
    s
}

fn target_interval(v: Vec<f64>) -> CliResult<Interval> {
    match v.as_slice() {
        [lo, hi] => Ok(Interval::new(*lo, *hi)?),
        _ => Err(CliError::Config("target needs exactly two numbers lo,hi".into())),
    }
}

fn union_summary(u: &IntervalUnion) -> Value {
    let hull = u.hull();
    json!({
        "components": u.len(),
        "measure": measure_estimate(u),
        "min": hull.map(|h| h.lo),
        "max": hull.map(|h| h.hi),
    })
}

fn sum(a: SumArgs, op: SumOp, ctx: &mut Ctx) -> CliResult<Output> {
    let k1 = ctx.set("k1", a.k1, "ternary")?;
    let k2 = ctx.set("k2", a.k2, "ternary")?;
    let depth = ctx.get("depth", a.depth, 8)?;
    let lambda = ctx.get("lambda", a.lambda, 1.0)?;
    let balanced = ctx.get("balanced", a.balanced.then_some(true), false)?;
    let cfg = sum_cfg(ctx);
    let u = if balanced {
        cover_sum_balanced(&k1, &k2, depth, op, lambda, &cfg)?
    } else {
        cover_sum_depths(&k1, &k2, (depth, depth), op, lambda, &cfg)?
    };
    let mut j = union_summary(&u);
    if let Some(t) = ctx.opt("target", a.target)? {
        let margin = ctx.get("margin", a.margin, 0.0)?;
        j["contains"] = json!(u.contains_interval(&target_interval(t)?, margin)?);
    }
    Ok(with_csv(j, union_csv(&u)))
}

#[derive(Args, Debug)]
pub struct HallArgs {
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    margin: Option<f64>,
}

fn hall(a: HallArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let depth = ctx.get("depth", a.depth, 8)?;
    let margin = ctx.get("margin", a.margin, 1e-3)?;
    let c4 = builtin("gauss:4")?;
    let r = std::f64::consts::SQRT_2 - 1.0;
    let target = Interval::new(r, 4.0 * r)?;
    let u = cover_sum_balanced(&c4, &c4, depth, SumOp::Plus, 1.0, &sum_cfg(ctx))?;
    let hull = u.hull().ok_or(cantorlab::Error::DegenerateCover)?;
    let mut j = union_summary(&u);
    j["contains"] = json!(u.contains_interval(&target, margin)?);
    j["target"] = json!([target.lo, target.hi]);
    j["endpoint_error"] = json!((hull.lo - target.lo).abs().max((hull.hi - target.hi).abs()));
    Ok(with_csv(j, union_csv(&u)))
}

#[derive(Args, Debug)]
pub struct MarstrandArgs {
    #[arg(long)]
    k1: Option<String>,
    #[arg(long)]
    k2: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
    /// Number of log-uniform λ samples.
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    lambda_min: Option<f64>,
    #[arg(long)]
    lambda_max: Option<f64>,
    /// Explicit λ values, overriding the random sample.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambdas: Option<Vec<f64>>,
    /// Grid exponents k for resolutions 2^-k.
    #[arg(long, value_delimiter = ',')]
    resolutions: Option<Vec<u32>>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn marstrand(a: MarstrandArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let k1 = ctx.set("k1", a.k1, "ternary")?;
    let k2 = ctx.set("k2", a.k2, "ternary")?;
    let depth = ctx.get("depth", a.depth, 10)?;
    let theta = ctx.get("theta", a.theta, DEFAULT_THETA)?;
    let exps = ctx.get("resolutions", a.resolutions, (6..=14).collect())?;
    let resolutions: Vec<f64> = exps.iter().map(|&k| 0.5f64.powi(k as i32)).collect();
    let lambdas = match ctx.opt("lambdas", a.lambdas)? {
        Some(l) => l,
        None => {
            let seed = ctx.require("seed", a.seed)?;
            let count = ctx.get("count", a.count, 200)?;
            let lo = ctx.get("lambda_min", a.lambda_min, 0.125)?;
            let hi = ctx.get("lambda_max", a.lambda_max, 8.0)?;
            if !(lo > 0.0 && hi >= lo) {
                return Err(CliError::Config("need 0 < lambda_min <= lambda_max".into()));
            }
            log_uniform_lambdas(count, lo, hi, seed)
        }
    };
    let scan = marstrand_scan(&k1, &k2, &lambdas, depth, &resolutions, theta, &sum_cfg(ctx))?;
    let slopes: Vec<Option<f64>> = (0..lambdas.len()).map(|i| scan.slope(i).ok()).collect();
    let mut csv = String::from("lambda,resolution,covered_length\n");
    for (l, r, c) in scan.csv_rows() {
        csv.push_str(&format!("{l:e},{r:e},{c:e}\n"));
    }
    let j = json!({
        "fraction_above_theta": scan.fraction_above_theta(),
        "theta": theta,
        "n": depth,
        "lambdas": lambdas.len(),
        "slopes": slopes,
    });
    Ok(with_csv(j, csv))
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct IntersectArgs {
    #[arg(long)]
    k1: Option<String>,
    #[arg(long)]
    k2: Option<String>,
    /// Translation: test K1 ∩ (K2 + t).
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    depth: Option<usize>,
    /// `lo,hi,count`: scan a grid of translations instead.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    scan: Option<Vec<f64>>,
    /// Also report which horn of the measure-zero / interval dichotomy holds.
    #[arg(long)]
    palis: bool,
}

fn intersect(a: IntersectArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let k1 = ctx.set("k1", a.k1, "middle-fifth")?;
    let k2 = ctx.set("k2", a.k2, "middle-fifth")?;
    let depth = ctx.get("depth", a.depth, 10)?;
    if let Some(s) = ctx.opt("scan", a.scan)? {
        let [lo, hi, count] = s.as_slice() else {
            return Err(CliError::Config("scan needs lo,hi,count".into()));
        };
        if !(*count >= 1.0) || count.fract() != 0.0 {
            return Err(CliError::Config("scan count must be a positive integer".into()));
        }
        let pts = difference_scan(&k1, &k2, &linspace(*lo, *hi, *count as usize), depth)?;
        let disjoint = pts.iter().filter(|p| p.outcome.is_disjoint()).count();
        let mut csv = String::from("t,outcome\n");
        for p in &pts {
            csv.push_str(&format!("{:e},{:?}\n", p.t, p.outcome));
        }
        let j = json!({
            "points": pts.len(),
            "overlap_fraction": (pts.len() - disjoint) as f64 / pts.len() as f64,
        });
        return Ok(with_csv(j, csv));
    }
    let t = ctx.get("t", a.t, 0.0)?;
    let trace = overlap_trace(&k1, &k2, t, depth, &cover_cfg(ctx))?;
    let mut j = json!({
        "outcome": trace.outcome,
        "pair_counts": trace.counts,
        "gap_lemma": gap_lemma_report(&k1, &k2, t),
    });
    if ctx.get("palis", a.palis.then_some(true), false)? {
        j["palis"] = json!(palis_probe(&k1, &k2, 8)?);
    }
    Ok(out(j))
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct RecurArgs {
    #[arg(long)]
    k1: Option<String>,
    #[arg(long)]
    k2: Option<String>,
    /// Cells along the log-scale axis.
    #[arg(long)]
    ns: Option<usize>,
    /// Cells along the translation axis.
    #[arg(long)]
    nt: Option<usize>,
    /// Required clearance, in cells, of images inside the member set.
    #[arg(long)]
    margin: Option<usize>,
    /// Translation reported through the gap lemma and the certificate.
    #[arg(long)]
    t: Option<f64>,
    /// Save the certificate here.
    #[arg(long)]
    certificate: Option<PathBuf>,
    /// Re-verify an existing certificate instead of searching.
    #[arg(long)]
    verify: Option<PathBuf>,
}

fn recur(a: RecurArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let k1 = ctx.set("k1", a.k1, "middle-fifth")?;
    let k2 = ctx.set("k2", a.k2, "middle-fifth")?;
    let t = ctx.get("t", a.t, 0.0)?;
    let gap = gap_lemma_report(&k1, &k2, t);
    if let Some(path) = ctx.opt("verify", a.verify)? {
        let cert = Certificate::from_json(&read_file(&path)?)?;
        let report = verify_certificate(&cert, &k1, &k2)?;
        return Ok(out(json!({
            "members": cert.members,
            "check": report,
            "certifies_t": cert.certifies_translation(&k1, &k2, t),
        })));
    }
    let ns = ctx.get("ns", a.ns, 200)?;
    let nt = ctx.get("nt", a.nt, 200)?;
    let margin = ctx.get("margin", a.margin, 1)?;
    let grid = PositionGrid::standard(ns, nt, margin);
    let outcome = recurrent_compact_search_with(&k1, &k2, &grid, &cover_cfg(ctx))?;
    let j = match &outcome {
        RecurrentOutcome::NotFound => json!({ "outcome": "NotFound", "gap_lemma": gap }),
        RecurrentOutcome::Certificate(cert) => {
            let report = verify_certificate(cert, &k1, &k2)?;
            if let Some(p) = ctx.opt("certificate", a.certificate)? {
                write_file(&p, &cert.to_json())?;
            }
            json!({
                "outcome": "Certificate",
                "members": cert.members,
                "check": report,
                "stability_radius": cert.stability_radius(),
                "certifies_t": cert.certifies_translation(&k1, &k2, t),
                "gap_lemma": gap,
            })
        }
    };
    Ok(out(j))
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct DstableArgs {
    #[arg(long)]
    k1: Option<String>,
    #[arg(long)]
    k2: Option<String>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    perturbations: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn dstable(a: DstableArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let k1 = ctx.set("k1", a.k1, "middle-fifth")?;
    let k2 = ctx.set("k2", a.k2, "middle-fifth")?;
    let t = ctx.get("t", a.t, 0.0)?;
    let d = ctx.get("d", a.d, 0.2)?;
    let perturbations = ctx.get("perturbations", a.perturbations, 16)?;
    let radius = ctx.get("radius", a.radius, 1e-3)?;
    let depth = ctx.get("depth", a.depth, 10)?;
    let seed = ctx.require("seed", a.seed)?;
    let probe = d_stable_probe(&k1, &k2, t, d, perturbations, radius, depth, seed)?;
    Ok(out(json!(probe)))
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct DensityArgs {
    #[arg(long)]
    k1: Option<String>,
    #[arg(long)]
    k2: Option<String>,
    #[arg(long)]
    t0: Option<f64>,
    /// `left` or `right`.
    #[arg(long)]
    side: Option<String>,
    /// Decreasing window sizes.
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    #[arg(long)]
    depth: Option<usize>,
}

fn density(a: DensityArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let k1 = ctx.set("k1", a.k1, "thin")?;
    let k2 = ctx.set("k2", a.k2, "thin")?;
    let t0 = ctx.require("t0", a.t0)?;
    let side = match ctx.get("side", a.side, "right".into())?.as_str() {
        "left" => Side::Left,
        "right" => Side::Right,
        s => return Err(CliError::Config(format!("side must be left or right, got '{s}'"))),
    };
    let deltas = ctx.get(
        "deltas",
        a.deltas,
        (1..=7).map(|i| 10f64.powf(-(i as f64 + 1.0) / 2.0)).collect(),
    )?;
    let depth = ctx.get("depth", a.depth, 8)?;
    let p = tangency_density_experiment(&k1, &k2, t0, &deltas, depth, side)?;
    let mut csv = String::from("delta,ratio\n");
    for (d, r) in p.deltas.iter().zip(&p.ratios) {
        csv.push_str(&format!("{d:e},{r:e}\n"));
    }
    Ok(with_csv(json!(p), csv))
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Period of the digit sequence, e.g. `2,1`.
    #[arg(long, value_delimiter = ',')]
    period: Option<Vec<Digit>>,
    /// Digits before the period.
    #[arg(long, value_delimiter = ',')]
    prefix: Option<Vec<Digit>>,
    #[arg(long)]
    window: Option<usize>,
    /// Sample the spectrum over all periods up to this length.
    #[arg(long)]
    max_period: Option<usize>,
    #[arg(long)]
    digit_bound: Option<Digit>,
}

fn spectrum_csv(values: &[SpectrumValue]) -> String {
    let mut s = String::from("value,witness_digits,window\n");
    for v in values {
        s.push_str(&format!("{:.15},\"{}\",{}\n", v.value, v.witness.notation(), v.window));
    }
    s
}

fn spectrum_json(v: &SpectrumValue) -> Value {
    json!({
        "value": v.value,
        "exact": v.exact.as_ref().map(|e| e.closed_form()),
        "witness": v.witness.notation(),
        "direct": v.direct,
        "tail": v.tail,
        "window": v.window,
    })
}

fn spectrum(a: SpectrumArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let window = ctx.get("window", a.window, cantorlab::spectra::DEFAULT_WINDOW)?;
    if let Some(period) = ctx.opt("period", a.period)? {
        let prefix = ctx.get("prefix", a.prefix, vec![])?;
        let seq = CFSequence::periodic(prefix, period)?;
        let v = k_alpha(&seq, window)?;
        return Ok(with_csv(spectrum_json(&v), spectrum_csv(std::slice::from_ref(&v))));
    }
    let Some(max_period) = ctx.opt("max_period", a.max_period)? else {
        return Err(CliError::Config("give --period or --max-period".into()));
    };
    let bound = ctx.get("digit_bound", a.digit_bound, 4)?;
    let values = lagrange_sample_with(max_period, bound, ctx.budget_or(cantorlab::spectra::LAGRANGE_BUDGET))?;
    let j = json!({
        "count": values.len(),
        "minimum": values.first().map(spectrum_json),
        "values": values.iter().map(spectrum_json).collect::<Vec<_>>(),
    });
    Ok(with_csv(j, spectrum_csv(&values)))
}

#[derive(Args, Debug)]
pub struct HalflineArgs {
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<f64>>,
    #[arg(long)]
    depth: Option<usize>,
}

fn halfline(a: HalflineArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let targets = ctx.get("targets", a.targets, vec![6.0, 7.25, 10.5])?;
    let depth = ctx.get("depth", a.depth, 8)?;
    let hits = hall_halfline_probe(&targets, depth)?;
    let mut csv = String::from("target,value,hit_distance,witness_digits\n");
    for h in &hits {
        csv.push_str(&format!(
            "{:e},{:.15},{:e},\"{}\"\n",
            h.target,
            h.value,
            h.hit_distance,
            h.witness.notation()
        ));
    }
    let j: Vec<Value> = hits
        .iter()
        .map(|h| {
            json!({
                "target": h.target,
                "value": h.value,
                "hit_distance": h.hit_distance,
                "marker": h.marker,
                "witness": h.witness.notation(),
            })
        })
        .collect();
    Ok(with_csv(json!({ "hits": j }), csv))
}

#[derive(Args, Debug)]
pub struct HorseshoeArgs {
    #[arg(long)]
    contraction: Option<f64>,
    #[arg(long)]
    expansion: Option<f64>,
    /// Solve for the contraction giving dimension 1.
    #[arg(long)]
    critical: bool,
}

fn horseshoe(a: HorseshoeArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let expansion = ctx.get("expansion", a.expansion, 3.0)?;
    let h = if ctx.get("critical", a.critical.then_some(true), false)? {
        critical_contraction(expansion)?
    } else {
        let c = ctx.get("contraction", a.contraction, 1.0 / 3.0)?;
        AffineHorseshoe::new(c, expansion)?
    };
    Ok(out(json!(horseshoe_report(&h)?)))
}

#[derive(Args, Debug)]
pub struct CatmapArgs {
    #[arg(long)]
    periods: Option<usize>,
}

fn catmap(a: CatmapArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let n = ctx.get("periods", a.periods, 10)?;
    let r = cat_map_check_with(n, ctx.budget_or(100_000_000))?;
    let mut csv = String::from("n,enumerated,formula\n");
    for c in &r.counts {
        csv.push_str(&format!("{},{},{}\n", c.n, c.enumerated, c.formula));
    }
    let mut j = json!(r);
    j["all_counts_match"] = json!(r.all_counts_match());
    Ok(with_csv(j, csv))
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct StdmapArgs {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    orbits: Option<usize>,
    #[arg(long)]
    iterates: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn stdmap(a: StdmapArgs, ctx: &mut Ctx) -> CliResult<Output> {
    let lambda = ctx.get("lambda", a.lambda, 0.0)?;
    let orbits = ctx.get("orbits", a.orbits, 200)?;
    let iterates = ctx.get("iterates", a.iterates, 10_000)?;
    let seed = ctx.require("seed", a.seed)?;
    let r = standard_family_lyapunov(lambda, orbits, iterates, seed)?;
    let mut csv = String::from("orbit_id,exponent\n");
    for o in &r.orbits {
        csv.push_str(&format!("{},{:e}\n", o.orbit_id, o.top));
    }
    let j = json!({
        "lambda": r.lambda,
        "mean_exponent": r.mean_exponent,
        "fraction_positive": r.fraction_positive,
        "max_abs_sum": r.max_abs_sum,
        "orbits": r.orbits.iter().map(|o| json!([o.top, o.bottom])).collect::<Vec<_>>(),
    });
    Ok(with_csv(j, csv))
}

fn list() -> CliResult<Output> {
    let entries: Vec<Value> = list_builtin_sets()
        .into_iter()
        .map(|e| {
            let k: Result<RegularCantorSet, _> = builtin(e.usage);
            let valid = k.as_ref().is_ok_and(|k| refine_with(k, 1, &CoverConfig::default()).is_ok());
            json!({
                "name": e.name,
                "usage": e.usage,
                "description": e.description,
                "pieces": k.as_ref().map(|k| k.num_pieces()).ok(),
                "valid": valid,
            })
        })
        .collect();
    Ok(out(json!({ "sets": entries })))
}
