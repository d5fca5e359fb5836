//! Intersections `K1 ∩ (K2 + t)` and what they say about `K1 − K2`.

mod recurrent;

pub use recurrent::{
    recurrent_compact_search, recurrent_compact_search_with, verify_certificate, CheckReport,
    Certificate, Move, PositionGrid, RecurrentOutcome, RelativePosition,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::{CoverConfig, CoverTree, Cursor, RegularCantorSet, Stop};
use crate::dimension::{hausdorff_dimension_moran, regression_slope, thickness};
use crate::error::{Error, Result};
use crate::interval::{Interval, MERGE_TOL};
use crate::setops::{cover_sum_depths, SumConfig, SumOp};

/// Two construction intervals count as overlapping when they are closer than this.
pub const OVERLAP_TOL: f64 = MERGE_TOL;

/// Depth of the thickness estimate used by the gap lemma.
pub const GAP_LEMMA_DEPTH: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntersectOutcome {
    /// The depth-`m` covers are disjoint, so the sets are.
    DisjointAtDepth(usize),
    /// Still overlapping at the requested depth; undecided.
    OverlapAtDepth(usize),
}

impl IntersectOutcome {
    pub fn is_disjoint(&self) -> bool {
        matches!(self, IntersectOutcome::DisjointAtDepth(_))
    }
}

/// Number of overlapping interval pairs per depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapTrace {
    pub outcome: IntersectOutcome,
    pub counts: Vec<usize>,
    /// Largest interval length among the pairs at each depth.
    pub radii: Vec<f64>,
}

fn overlapping(a: &Interval, b: &Interval, t: f64) -> bool {
    a.lo <= b.hi + t + OVERLAP_TOL && b.lo + t <= a.hi + OVERLAP_TOL
}

pub fn overlap_trace(
    k1: &RegularCantorSet,
    k2: &RegularCantorSet,
    t: f64,
    n: usize,
    cfg: &CoverConfig,
) -> Result<OverlapTrace> {
    let (p1, p2) = (Cursor::pieces(k1), Cursor::pieces(k2));
    let mut pairs: Vec<(Cursor, Cursor)> = Vec::new();
    for a in &p1 {
        for b in &p2 {
            if overlapping(&a.interval, &b.interval, t) {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    let mut counts = Vec::new();
    let mut radii = Vec::new();
    for depth in 0..=n {
        if pairs.is_empty() {
            return Ok(OverlapTrace {
                outcome: IntersectOutcome::DisjointAtDepth(depth),
                counts,
                radii,
            });
        }
        counts.push(pairs.len());
        radii.push(
            pairs
                .iter()
                .map(|(a, b)| a.interval.len().max(b.interval.len()))
                .fold(0.0, f64::max),
        );
        if depth == n {
            break;
        }
        let mut next = Vec::new();
        for (a, b) in &pairs {
            let (ca, cb) = (a.children(k1, cfg.min_length)?, b.children(k2, cfg.min_length)?);
            for x in &ca {
                for y in &cb {
                    if overlapping(&x.interval, &y.interval, t) {
                        next.push((x.clone(), y.clone()));
                    }
                }
            }
            if next.len() > cfg.budget {
                return Err(Error::BudgetExceeded {
                    what: "overlapping interval pairs",
                    needed: next.len() as u128,
                    budget: cfg.budget as u128,
                });
            }
        }
        pairs = next;
    }
    Ok(OverlapTrace {
        outcome: IntersectOutcome::OverlapAtDepth(n),
        counts,
        radii,
    })
}

/// Looks for a depth `m <= n` at which the covers of `K1` and `K2 + t` are disjoint.
pub fn intersect_test(k1: &RegularCantorSet, k2: &RegularCantorSet, t: f64, n: usize) -> Result<IntersectOutcome> {
    Ok(overlap_trace(k1, k2, t, n, &CoverConfig::default())?.outcome)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub t: f64,
    pub outcome: IntersectOutcome,
}

pub fn difference_scan(
    k1: &RegularCantorSet,
    k2: &RegularCantorSet,
    grid: &[f64],
    n: usize,
) -> Result<Vec<ScanPoint>> {
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("scan grid must be sorted"));
    }
    grid.par_iter()
        .map(|&t| {
            Ok(ScanPoint {
                t,
                outcome: intersect_test(k1, k2, t, n)?,
            })
        })
        .collect()
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapLemmaOutcome {
    CertifiedIntersection,
    NoCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapLemmaReport {
    pub outcome: GapLemmaOutcome,
    pub tau1: f64,
    pub tau2: f64,
    pub linked: bool,
}

pub fn gap_lemma_test(k1: &RegularCantorSet, k2: &RegularCantorSet, t: f64) -> GapLemmaOutcome {
    gap_lemma_report(k1, k2, t).outcome
}

/// Newhouse's criterion: `τ1 τ2 > 1` and the sets are linked.
pub fn gap_lemma_report(k1: &RegularCantorSet, k2: &RegularCantorSet, t: f64) -> GapLemmaReport {
    let tau = |k: &RegularCantorSet| {
        (1..=GAP_LEMMA_DEPTH)
            .rev()
            .find_map(|n| thickness(k, n).ok())
            .map_or(0.0, |e| e.value)
    };
    let (tau1, tau2) = (tau(k1), tau(k2));
    let linked = linked(k1, k2, t);
    let outcome = if tau1 * tau2 > 1.0 && linked {
        GapLemmaOutcome::CertifiedIntersection
    } else {
        GapLemmaOutcome::NoCertificate
    };
    GapLemmaReport {
        outcome,
        tau1,
        tau2,
        linked,
    }
}

/// Hulls overlap and neither hull lies in a gap of the other set.
pub fn linked(k1: &RegularCantorSet, k2: &RegularCantorSet, t: f64) -> bool {
    let h1 = k1.hull();
    let h2 = k2.hull().affine(1.0, t);
    if !h1.overlaps(&h2) {
        return false;
    }
    // K2 + t has the gaps of K2 shifted by t
    hull_in_gap(k1, &h2) == Some(false) && hull_in_gap(k2, &h1.affine(1.0, -t)) == Some(false)
}

/// Whether `h` sits inside a bounded gap of `k`; `None` if undecided.
fn hull_in_gap(k: &RegularCantorSet, h: &Interval) -> Option<bool> {
    if !k.hull().contains_interval(h) {
        return Some(false);
    }
    let mut level = Cursor::pieces(k);
    for _ in 0..64 {
        let meeting: Vec<&Cursor> = level.iter().filter(|c| c.interval.overlaps(h)).collect();
        let Some(first) = meeting.first() else {
            return Some(true);
        };
        // interval endpoints belong to the set
        if meeting
            .iter()
            .any(|c| h.contains(c.interval.lo) || h.contains(c.interval.hi))
        {
            return Some(false);
        }
        level = first.children(k, 0.0).ok()?;
    }
    None
}

/// Fraction of random perturbations whose cover intersection has box
/// dimension at least `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DStableProbe {
    pub fraction: f64,
    pub estimates: Vec<f64>,
}

#[allow(clippy::too_many_arguments)]
pub fn d_stable_probe(
    k1: &RegularCantorSet,
    k2: &RegularCantorSet,
    t: f64,
    d: f64,
    perturbations: usize,
    radius: f64,
    n: usize,
    seed: u64,
) -> Result<DStableProbe> {
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::invalid("d must lie in (0, 1)"));
    }
    if perturbations == 0 || !(radius >= 0.0) {
        return Err(Error::invalid("need at least one perturbation and radius >= 0"));
    }
    let cfg = CoverConfig::default();
    let estimates = (0..perturbations)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let a = perturb(k1, radius, &mut rng)?;
            let b = perturb(k2, radius, &mut rng)?;
            intersection_dimension(&a, &b, t, n, &cfg)
        })
        .collect::<Result<Vec<f64>>>()?;
    let hits = estimates.iter().filter(|&&e| e >= d).count();
    Ok(DStableProbe {
        fraction: hits as f64 / perturbations as f64,
        estimates,
    })
}

/// Uniform endpoint perturbation, resampled until the result validates.
pub fn perturb(k: &RegularCantorSet, radius: f64, rng: &mut impl Rng) -> Result<RegularCantorSet> {
    if radius == 0.0 {
        return Ok(k.clone());
    }
    let mut last = None;
    for _ in 0..100 {
        let deltas: Vec<f64> = (0..2 * k.num_pieces())
            .map(|_| rng.gen_range(-radius..=radius))
            .collect();
        match k.perturbed_pieces(&deltas) {
            Ok(p) => return Ok(p),
            Err(e @ Error::NonAffineInput) => return Err(e),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or(Error::DegenerateCover))
}

/// Box-dimension estimate of `K1 ∩ (K2 + t)` from overlapping-pair counts
/// over the upper half of the depths; 0 if the covers separate.
pub fn intersection_dimension(
    k1: &RegularCantorSet,
    k2: &RegularCantorSet,
    t: f64,
    n: usize,
    cfg: &CoverConfig,
) -> Result<f64> {
    let trace = overlap_trace(k1, k2, t, n, cfg)?;
    if trace.outcome.is_disjoint() {
        return Ok(0.0);
    }
    let from = n / 2;
    let pts: Vec<(f64, f64)> = (from..=n)
        .map(|m| (-trace.radii[m].ln(), (trace.counts[m] as f64).ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateCover);
    }
    Ok(regression_slope(&pts)?.0.max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub t0: f64,
    pub side: Side,
    pub deltas: Vec<f64>,
    pub ratios: Vec<f64>,
}

/// `m(cover(K1 − K2) ∩ window_δ) / δ` for the one-sided windows at `t0`.
pub fn tangency_density_experiment(
    k1: &RegularCantorSet,
    k2: &RegularCantorSet,
    t0: f64,
    deltas: &[f64],
    n: usize,
    side: Side,
) -> Result<DensityProfile> {
    if deltas.iter().any(|&d| !(d > 0.0)) || deltas.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::invalid("deltas must be positive and decreasing"));
    }
    let cover = cover_sum_depths(k1, k2, (n, n), SumOp::Minus, 1.0, &SumConfig::default())?;
    if cover.distance(t0) > OVERLAP_TOL {
        return Err(Error::TZeroNotInDifference(t0));
    }
    let ratios = deltas
        .iter()
        .map(|&d| {
            let w = match side {
                Side::Right => Interval { lo: t0, hi: t0 + d },
                Side::Left => Interval { lo: t0 - d, hi: t0 },
            };
            (cover.measure_in(&w) / d).clamp(0.0, 1.0)
        })
        .collect();
    Ok(DensityProfile {
        t0,
        side,
        deltas: deltas.to_vec(),
        ratios,
    })
}

/// Which horn of the measure-zero / interior dichotomy the data supports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "evidence", rename_all = "kebab-case")]
pub enum PalisEvidence {
    /// `HD(K1) + HD(K2) < 1`, so `K1 − K2` is null.
    MeasureZero { dimension_sum: f64 },
    /// Every `t` in the interval passes the gap lemma.
    ContainsInterval { lo: f64, hi: f64 },
    Inconclusive { dimension_sum: f64, thickness_product: f64 },
}

pub fn palis_probe(k1: &RegularCantorSet, k2: &RegularCantorSet, n: usize) -> Result<PalisEvidence> {
    let d1 = hausdorff_dimension_moran(k1, n, 1e-12)?.value;
    let d2 = hausdorff_dimension_moran(k2, n, 1e-12)?.value;
    let dimension_sum = d1 + d2;
    if dimension_sum < 1.0 - 1e-6 {
        return Ok(PalisEvidence::MeasureZero { dimension_sum });
    }
    let report = gap_lemma_report(k1, k2, 0.0);
    let thickness_product = report.tau1 * report.tau2;
    if thickness_product > 1.0 {
        if let Some((lo, hi)) = linked_translations(k1, k2)?
            .into_iter()
            .max_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0)))
            .filter(|(lo, hi)| hi > lo)
        {
            return Ok(PalisEvidence::ContainsInterval { lo, hi });
        }
    }
    Ok(PalisEvidence::Inconclusive {
        dimension_sum,
        thickness_product,
    })
}

/// Closed intervals of translations `t` for which `K1` and `K2 + t` are linked.
pub fn linked_translations(k1: &RegularCantorSet, k2: &RegularCantorSet) -> Result<Vec<(f64, f64)>> {
    let (h1, h2) = (k1.hull(), k2.hull());
    let mut bad: Vec<(f64, f64)> = Vec::new();
    // K1 inside a gap G of K2 + t
    for g in long_gaps(k2, h1.len())? {
        bad.push((h1.hi - g.hi, h1.lo - g.lo));
    }
    // K2 + t inside a gap G of K1
    for g in long_gaps(k1, h2.len())? {
        bad.push((g.lo - h2.lo, g.hi - h2.hi));
    }
    bad.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    let mut cur = h1.lo - h2.hi;
    let end = h1.hi - h2.lo;
    for (lo, hi) in bad {
        // bad sets are open intervals
        if lo >= cur {
            out.push((cur, lo.min(end)));
        }
        cur = cur.max(hi);
        if cur > end {
            break;
        }
    }
    if cur <= end {
        out.push((cur, end));
    }
    out.retain(|(a, b)| b >= a);
    Ok(out)
}

/// Gaps of `k` strictly longer than `len`.
fn long_gaps(k: &RegularCantorSet, len: f64) -> Result<Vec<Interval>> {
    let tree = CoverTree::build(
        k,
        Stop::Scale {
            length: len,
            max_depth: 64,
        },
        &CoverConfig::default(),
    )?;
    let leaves = tree.leaf_indices();
    Ok(leaves
        .windows(2)
        .map(|w| Interval {
            lo: tree.nodes[w[0] as usize].interval.hi,
            hi: tree.nodes[w[1] as usize].interval.lo,
        })
        .filter(|g| g.len() > len)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::Q;
    use crate::setops::cover_sum;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn ternary() -> RegularCantorSet {
        RegularCantorSet::build_affine_exact(
            &[(Q::new(0, 1), Q::new(1, 3)), (Q::new(2, 3), Q::new(1, 1))],
            &[(0, 0), (0, 1), (1, 0), (1, 1)],
        )
        .unwrap()
    }

    fn thin() -> RegularCantorSet {
        RegularCantorSet::build_affine_full(vec![iv(0.0, 0.1), iv(0.9, 1.0)]).unwrap()
    }

    fn fifth() -> RegularCantorSet {
        RegularCantorSet::build_affine_full(vec![iv(0.0, 0.4), iv(0.6, 1.0)]).unwrap()
    }

    #[test]
    fn ternary_translations() {
        for n in [0, 3, 9] {
            assert_eq!(intersect_test(&ternary(), &ternary(), 0.0, n).unwrap(), IntersectOutcome::OverlapAtDepth(n));
            assert_eq!(intersect_test(&ternary(), &ternary(), 0.5, n).unwrap(), IntersectOutcome::OverlapAtDepth(n));
        }
        assert_eq!(
            intersect_test(&ternary(), &ternary(), 2.5, 5).unwrap(),
            IntersectOutcome::DisjointAtDepth(0)
        );
    }

    #[test]
    fn scan_matches_difference_identity_and_cover() {
        let grid = linspace(-1.2, 1.2, 401);
        let scan = difference_scan(&ternary(), &ternary(), &grid, 8).unwrap();
        for p in &scan {
            let inside = p.t.abs() <= 1.0 + 1e-12;
            assert_eq!(!p.outcome.is_disjoint(), inside, "t={}", p.t);
        }
        let u = cover_sum(&thin(), &thin(), 5, SumOp::Minus, 1.0).unwrap();
        for p in difference_scan(&thin(), &thin(), &grid, 5).unwrap() {
            assert_eq!(!p.outcome.is_disjoint(), u.distance(p.t) <= OVERLAP_TOL, "t={}", p.t);
        }
    }

    #[test]
    fn thin_scan_fraction_shrinks() {
        let grid = linspace(-1.2, 1.2, 401);
        let frac = |n| {
            let s = difference_scan(&thin(), &thin(), &grid, n).unwrap();
            s.iter().filter(|p| !p.outcome.is_disjoint()).count() as f64 / s.len() as f64
        };
        let f: Vec<f64> = (0..=8).map(frac).collect();
        assert!(f.windows(2).all(|w| w[1] <= w[0]), "{f:?}");
        assert!(f[8] < 0.5 && f[8] < f[1], "{f:?}");
    }

    #[test]
    fn gap_lemma_examples() {
        let r = gap_lemma_report(&fifth(), &fifth(), 0.3);
        assert!((r.tau1 - 2.0).abs() < 1e-9);
        assert_eq!(r.outcome, GapLemmaOutcome::CertifiedIntersection);
        assert_eq!(gap_lemma_test(&ternary(), &ternary(), 0.3), GapLemmaOutcome::NoCertificate);
        assert_eq!(gap_lemma_test(&fifth(), &fifth(), 1.5), GapLemmaOutcome::NoCertificate);
    }

    #[test]
    fn hull_inside_a_gap_is_not_linked() {
        // the shifted hull [0.45, 0.55] sits in the middle gap
        let small = RegularCantorSet::build_affine_full(vec![iv(0.0, 0.04), iv(0.06, 0.1)]).unwrap();
        assert!(!linked(&fifth(), &small, 0.45));
        assert!(linked(&fifth(), &small, 0.35));
        // deeper gap: [0.16, 0.24] inside (0.16, 0.24) of depth 1
        assert_eq!(hull_in_gap(&fifth(), &iv(0.17, 0.23)), Some(true));
        assert_eq!(hull_in_gap(&fifth(), &iv(0.15, 0.23)), Some(false));
    }

    #[test]
    fn density_examples() {
        let p = tangency_density_experiment(&ternary(), &ternary(), 0.0, &[0.5, 0.25, 0.125], 8, Side::Right).unwrap();
        assert!(p.ratios.iter().all(|&r| (r - 1.0).abs() < 1e-12));
        assert!(matches!(
            tangency_density_experiment(&thin(), &thin(), 0.5, &[0.1], 6, Side::Left),
            Err(Error::TZeroNotInDifference(_))
        ));
        let deltas: Vec<f64> = (2..=10).map(|k| 2f64.powi(-k)).collect();
        let p = tangency_density_experiment(&thin(), &thin(), 1.0, &deltas, 10, Side::Left).unwrap();
        assert!(*p.ratios.last().unwrap() < 0.3, "{:?}", p.ratios);
    }

    #[test]
    fn palis_horns() {
        assert!(matches!(palis_probe(&thin(), &thin(), 6).unwrap(), PalisEvidence::MeasureZero { .. }));
        match palis_probe(&fifth(), &fifth(), 6).unwrap() {
            PalisEvidence::ContainsInterval { lo, hi } => assert!(lo <= -0.5 && hi >= 0.5, "{lo} {hi}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn d_stable_examples() {
        let p = d_stable_probe(&fifth(), &fifth(), 0.3, 0.2, 16, 1e-3, 10, 7).unwrap();
        assert_eq!(p.fraction, 1.0, "{:?}", p.estimates);
        let q = d_stable_probe(&thin(), &thin(), 0.9, 0.1, 16, 1e-3, 10, 7).unwrap();
        assert_eq!(q.fraction, 0.0, "{:?}", q.estimates);
        let z = d_stable_probe(&fifth(), &fifth(), 0.3, 0.2, 4, 0.0, 8, 1).unwrap();
        assert!(z.estimates.windows(2).all(|w| w[0] == w[1]));
    }
}
