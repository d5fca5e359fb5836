//! Fractal invariants of regular Cantor sets.
//!
//! Box dimension is a least-squares slope over cover depths, Hausdorff
//! dimension is the root of the discretised Moran equation
//! `sum |I|^d = 1` over a depth-`n` cover (lengths relative to the hull, so
//! the root does not depend on where the set sits on the line), and thickness
//! follows Newhouse: gaps in decreasing order, each compared with the bridges
//! reaching out to the nearest gap at least as long.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::cantor::{refine_with, CoverConfig, CoverTree, RegularCantorSet, Stop, Word};
use crate::error::{Error, Result};
use crate::interval::IntervalUnion;

/// Upper end of the bisection bracket for the Moran root.
pub const MORAN_UPPER: f64 = 1.0 + 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionMethod {
    BoxRegression,
    MoranRoot,
    /// Sum of factor dimensions, used for products such as horseshoes.
    ProductSum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub value: f64,
    pub method: DimensionMethod,
    pub depth_used: usize,
    /// Regression RMS or final bracket width.
    pub residual: f64,
}

/// One `(depth, N, r)` sample of a box-count regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSample {
    pub depth: usize,
    pub count: usize,
    pub radius: f64,
}

/// Least-squares slope of `y` against `x`, with the RMS residual.
pub fn regression_slope(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::invalid("regression needs at least two points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("regression abscissae are all equal"));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rms = (points
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok((slope, rms))
}

/// Interval count and maximal length at every depth in `depths`.
pub fn box_samples(
    k: &RegularCantorSet,
    depths: RangeInclusive<usize>,
    cfg: &CoverConfig,
) -> Result<Vec<BoxSample>> {
    if depths.is_empty() {
        return Err(Error::invalid("empty depth range"));
    }
    let tree = CoverTree::build(k, Stop::Depth(*depths.end()), cfg)?;
    let levels = *depths.end() + 1;
    let mut count = vec![0usize; levels];
    let mut radius = vec![0f64; levels];
    for node in &tree.nodes[1..] {
        let d = node.level as usize - 1;
        count[d] += 1;
        radius[d] = radius[d].max(node.interval.len());
    }
    Ok(depths
        .map(|d| BoxSample {
            depth: d,
            count: count[d],
            radius: radius[d],
        })
        .collect())
}

pub fn box_dimension(k: &RegularCantorSet, depths: RangeInclusive<usize>) -> Result<DimensionEstimate> {
    box_dimension_with(k, depths, &CoverConfig::default())
}

pub fn box_dimension_with(
    k: &RegularCantorSet,
    depths: RangeInclusive<usize>,
    cfg: &CoverConfig,
) -> Result<DimensionEstimate> {
    let samples = box_samples(k, depths, cfg)?;
    estimate_from_samples(&samples)
}

pub fn estimate_from_samples(samples: &[BoxSample]) -> Result<DimensionEstimate> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .map(|s| (-s.radius.ln(), (s.count as f64).ln()))
        .collect();
    let (slope, rms) = regression_slope(&pts)?;
    Ok(DimensionEstimate {
        value: slope,
        method: DimensionMethod::BoxRegression,
        depth_used: samples.iter().map(|s| s.depth).max().unwrap_or(0),
        residual: rms,
    })
}

/// Grid-count dimension of an interval union over the given cell sizes.
pub fn union_box_dimension(u: &IntervalUnion, resolutions: &[f64]) -> Result<DimensionEstimate> {
    if u.is_empty() {
        return Err(Error::invalid("empty union has no box dimension"));
    }
    let pts: Vec<(f64, f64)> = resolutions
        .iter()
        .map(|&r| (-r.ln(), (u.grid_cells(r) as f64).ln()))
        .collect();
    let (slope, rms) = regression_slope(&pts)?;
    Ok(DimensionEstimate {
        value: slope,
        method: DimensionMethod::BoxRegression,
        depth_used: u.depth.unwrap_or(0),
        residual: rms,
    })
}

/// Root of `sum_i x_i^d = 1` on `[0, MORAN_UPPER]`, where `x_i = len_i / scale`.
///
/// Returns the bracket midpoint and final width.
pub fn moran_root(lengths: &[f64], scale: f64, tol: f64) -> Result<(f64, f64)> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if lengths.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::DegenerateCover);
    }
    let logs: Vec<f64> = lengths.iter().map(|&l| (l / scale).ln()).collect();
    let f = |d: f64| logs.iter().map(|&g| (d * g).exp()).sum::<f64>() - 1.0;
    let (mut lo, mut hi) = (0.0, MORAN_UPPER);
    if f(lo) < 0.0 || f(hi) > 0.0 {
        return Err(Error::invalid("Moran map has no sign change on [0, 1]"));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), hi - lo))
}

pub fn hausdorff_dimension_moran(k: &RegularCantorSet, n: usize, tol: f64) -> Result<DimensionEstimate> {
    hausdorff_dimension_moran_with(k, n, tol, &CoverConfig::default())
}

pub fn hausdorff_dimension_moran_with(
    k: &RegularCantorSet,
    n: usize,
    tol: f64,
    cfg: &CoverConfig,
) -> Result<DimensionEstimate> {
    let cover = refine_with(k, n, cfg)?;
    let lengths: Vec<f64> = cover.intervals.iter().map(|iv| iv.len()).collect();
    let (value, width) = moran_root(&lengths, k.hull().len(), tol)?;
    Ok(DimensionEstimate {
        value,
        method: DimensionMethod::MoranRoot,
        depth_used: n,
        residual: width,
    })
}

/// Moran roots at each depth; for non-affine sets these drift with depth.
pub fn moran_drift(
    k: &RegularCantorSet,
    depths: RangeInclusive<usize>,
    tol: f64,
    cfg: &CoverConfig,
) -> Result<Vec<(usize, f64)>> {
    depths
        .map(|n| hausdorff_dimension_moran_with(k, n, tol, cfg).map(|e| (n, e.value)))
        .collect()
}

/// Dimension of a product set as the sum of its factors' dimensions.
pub fn product_dimension(a: &DimensionEstimate, b: &DimensionEstimate) -> DimensionEstimate {
    DimensionEstimate {
        value: a.value + b.value,
        method: DimensionMethod::ProductSum,
        depth_used: a.depth_used.max(b.depth_used),
        residual: a.residual + b.residual,
    }
}

/// Location of a gap: it sits inside the construction interval `parent`,
/// between the children `left` and `right`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapAddress {
    pub parent: Word,
    pub left: u16,
    pub right: u16,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThicknessEstimate {
    pub value: f64,
    pub depth_used: usize,
    pub limiting_gap: GapAddress,
}

pub fn thickness(k: &RegularCantorSet, n: usize) -> Result<ThicknessEstimate> {
    thickness_with(k, n, &CoverConfig::default())
}

pub fn thickness_with(k: &RegularCantorSet, n: usize, cfg: &CoverConfig) -> Result<ThicknessEstimate> {
    let cover = refine_with(k, n, cfg)?;
    if cover.len() < 2 {
        return Err(Error::NoGaps(n));
    }
    let gaps: Vec<(f64, f64)> = cover
        .intervals
        .windows(2)
        .map(|w| (w[0].hi, w[1].lo))
        .collect();
    let (value, idx) = newhouse_thickness(&gaps, k.hull().lo, k.hull().hi);
    let (wl, wr) = (&cover.addresses[idx], &cover.addresses[idx + 1]);
    let split = wl.iter().zip(wr).take_while(|(a, b)| a == b).count();
    Ok(ThicknessEstimate {
        value,
        depth_used: n,
        limiting_gap: GapAddress {
            parent: wl[..split].to_vec(),
            left: wl[split],
            right: wr[split],
        },
    })
}

/// Thickness of a set with hull `[lo, hi]` and the given sorted gaps.
///
/// The bridge on each side of a gap `U` runs to the nearest gap at least as
/// long as `U` (or to the hull end). Returns the infimum and the index of the
/// gap attaining it.
pub fn newhouse_thickness(gaps: &[(f64, f64)], lo: f64, hi: f64) -> (f64, usize) {
    let m = gaps.len();
    let len = |i: usize| gaps[i].1 - gaps[i].0;
    // previous / next gap with length >= own length, via monotone stacks
    let mut left_bound = vec![lo; m];
    let mut stack: Vec<usize> = Vec::new();
    for i in 0..m {
        while let Some(&t) = stack.last() {
            if len(t) >= len(i) {
                break;
            }
            stack.pop();
        }
        if let Some(&t) = stack.last() {
            left_bound[i] = gaps[t].1;
        }
        stack.push(i);
    }
    let mut right_bound = vec![hi; m];
    stack.clear();
    for i in (0..m).rev() {
        while let Some(&t) = stack.last() {
            if len(t) >= len(i) {
                break;
            }
            stack.pop();
        }
        if let Some(&t) = stack.last() {
            right_bound[i] = gaps[t].0;
        }
        stack.push(i);
    }
    let mut best = (f64::INFINITY, 0);
    for i in 0..m {
        let bridge = (gaps[i].0 - left_bound[i]).min(right_bound[i] - gaps[i].1);
        let ratio = bridge / len(i);
        if ratio < best.0 {
            best = (ratio, i);
        }
    }
    best
}

/// The strict inequality `(ds+du)^2 + max^2 < ds + du + max`.
pub fn nonuniform_condition(ds: f64, du: f64) -> Result<bool> {
    if !(ds > 0.0 && ds < 1.0 && du > 0.0 && du < 1.0) {
        return Err(Error::invalid("dimensions must lie in (0, 1)"));
    }
    let s = ds + du;
    let m = ds.max(du);
    Ok(s * s + m * m < s + m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::Q;
    use crate::interval::Interval;

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

    #[test]
    fn ternary_box_dimension_is_exact_slope() {
        let est = box_dimension(&ternary(), 2..=10).unwrap();
        assert!((est.value - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!(est.residual < 1e-9);
    }

    #[test]
    fn middle_fifth_box_dimension() {
        let k = RegularCantorSet::build_affine_full(vec![iv(0.0, 0.4), iv(0.6, 1.0)]).unwrap();
        let est = box_dimension(&k, 2..=10).unwrap();
        assert!((est.value - 2f64.ln() / 2.5f64.ln()).abs() < 0.01);
    }

    #[test]
    fn full_interval_grid_dimension_is_one() {
        let u = IntervalUnion::from_intervals(vec![iv(0.0, 1.0)]);
        let res: Vec<f64> = (8..16).map(|k| 2f64.powi(-k)).collect();
        let est = union_box_dimension(&u, &res).unwrap();
        assert!((est.value - 1.0).abs() < 0.01);
    }

    #[test]
    fn moran_ternary_closed_form() {
        for n in [0, 3, 8] {
            let est = hausdorff_dimension_moran(&ternary(), n, 1e-9).unwrap();
            assert!((est.value - 2f64.ln() / 3f64.ln()).abs() <= 1e-9);
            assert!(est.residual <= 1e-9);
        }
    }

    #[test]
    fn moran_unequal_ratios_golden() {
        // ratios 1/2 and 1/4: y + y^2 = 1 with y = 2^-d
        let k = RegularCantorSet::build_affine_full(vec![iv(0.0, 0.5), iv(0.75, 1.0)]).unwrap();
        let expected = ((1.0 + 5f64.sqrt()) / 2.0).ln() / 2f64.ln();
        for n in [0, 4, 9] {
            let est = hausdorff_dimension_moran(&k, n, 1e-10).unwrap();
            assert!((est.value - expected).abs() < 1e-9, "n={n}: {}", est.value);
        }
    }

    #[test]
    fn moran_rejects_degenerate_lengths() {
        assert_eq!(moran_root(&[0.1, 0.0], 1.0, 1e-6), Err(Error::DegenerateCover));
    }

    #[test]
    fn thickness_examples() {
        let t = thickness(&ternary(), 3).unwrap();
        assert!((t.value - 1.0).abs() < 1e-12);
        let mf = RegularCantorSet::build_affine_full(vec![iv(0.0, 0.4), iv(0.6, 1.0)]).unwrap();
        assert!((thickness(&mf, 4).unwrap().value - 2.0).abs() < 1e-12);
        let thick = RegularCantorSet::build_affine_full(vec![iv(0.0, 0.45), iv(0.55, 1.0)]).unwrap();
        let t = thickness(&thick, 0).unwrap();
        assert!((t.value - 4.5).abs() < 1e-12);
        assert_eq!(t.limiting_gap, GapAddress { parent: vec![], left: 0, right: 1 });
    }

    #[test]
    fn thickness_uses_larger_gaps_as_bridge_ends() {
        // hull [0,10], gaps (2,3) and (6,8): the short gap's right bridge stops at 6
        let gaps = [(2.0, 3.0), (6.0, 8.0)];
        let (tau, idx) = newhouse_thickness(&gaps, 0.0, 10.0);
        assert!((tau - 1.0).abs() < 1e-15);
        assert_eq!(idx, 1);
    }

    #[test]
    fn nonuniform_condition_examples() {
        assert!(nonuniform_condition(0.5, 0.5).unwrap());
        assert!(!nonuniform_condition(0.7, 0.7).unwrap());
        // equality when 5 d^2 = 3 d, i.e. d = 0.6
        assert!(!nonuniform_condition(0.6, 0.6).unwrap());
        assert!(nonuniform_condition(0.6 - 1e-9, 0.6 - 1e-9).unwrap());
        assert!(nonuniform_condition(0.0, 0.5).is_err());
    }
}
