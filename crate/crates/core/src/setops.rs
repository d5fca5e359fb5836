//! Arithmetic of Cantor sets through their covers.
//!
//! `S_n = ⋃ { I + μ J : I ∈ Cover_n(K1), J ∈ Cover_n(K2) }` contains
//! `K1 + μ K2` and decreases to it. The union is built by a depth-first walk
//! over pairs of construction intervals; a pair whose combined interval is
//! already inside the union built so far is skipped together with all of its
//! descendants, which leaves the result unchanged.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::{CoverConfig, CoverTree, RegularCantorSet, Stop};
use crate::dimension::box_samples;
use crate::error::{Error, Result};
use crate::interval::{IntervalUnion, UnionBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumOp {
    Plus,
    Minus,
}

impl SumOp {
    fn factor(self, lambda: f64) -> f64 {
        match self {
            SumOp::Plus => lambda,
            SumOp::Minus => -lambda,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumConfig {
    pub cover: CoverConfig,
    /// Maximum number of interval pairs visited by one sum.
    pub pair_budget: u64,
}

impl Default for SumConfig {
    fn default() -> Self {
        SumConfig {
            cover: CoverConfig::default(),
            pair_budget: 200_000_000,
        }
    }
}

/// `S_n` for `K1 op λ K2` with both covers at depth `n`.
pub fn cover_sum(
    k1: &RegularCantorSet,
    k2: &RegularCantorSet,
    n: usize,
    op: SumOp,
    lambda: f64,
) -> Result<IntervalUnion> {
    cover_sum_depths(k1, k2, (n, n), op, lambda, &SumConfig::default())
}

/// Outer cover of `K1 op λ K2` from covers at depths `(n1, n2)`.
pub fn cover_sum_depths(
    k1: &RegularCantorSet,
    k2: &RegularCantorSet,
    depths: (usize, usize),
    op: SumOp,
    lambda: f64,
    cfg: &SumConfig,
) -> Result<IntervalUnion> {
    if !lambda.is_finite() {
        return Err(Error::invalid("lambda must be finite"));
    }
    let t1 = CoverTree::build(k1, Stop::Depth(depths.0), &cfg.cover)?;
    let t2 = CoverTree::build(k2, Stop::Depth(depths.1), &cfg.cover)?;
    let u = sum_trees(&t1, &t2, op.factor(lambda), cfg.pair_budget)?;
    Ok(u.with_depth(depths.0.max(depths.1)))
}

/// Cover of `K1 op λ K2` with `K2`'s depth chosen so that `|λ| |J|` matches
/// `|I|` at depth `n` of `K1`.
pub fn cover_sum_balanced(
    k1: &RegularCantorSet,
    k2: &RegularCantorSet,
    n: usize,
    op: SumOp,
    lambda: f64,
    cfg: &SumConfig,
) -> Result<IntervalUnion> {
    let depths = balanced_depths(k1, k2, n, lambda, &cfg.cover)?;
    let u = cover_sum_depths(k1, k2, depths, op, lambda, cfg)?;
    Ok(u.with_depth(n))
}

/// Depth for `K2` whose scaled maximal interval length is closest (in log) to
/// that of `K1` at depth `n`.
pub fn balanced_depths(
    k1: &RegularCantorSet,
    k2: &RegularCantorSet,
    n: usize,
    lambda: f64,
    cfg: &CoverConfig,
) -> Result<(usize, usize)> {
    if lambda == 0.0 {
        return Ok((n, 0));
    }
    let target = box_samples(k1, n..=n, cfg)?[0].radius.ln();
    let scale = lambda.abs().ln();
    let mut best = (f64::INFINITY, 0usize);
    let mut depth = 0usize;
    loop {
        let samples = match box_samples(k2, depth..=depth, cfg) {
            Ok(s) => s,
            Err(e) if depth > 0 && (e.is_budget() || matches!(e, Error::PrecisionLoss { .. })) => break,
            Err(e) => return Err(e),
        };
        let r = samples[0].radius.ln() + scale;
        let gap = (r - target).abs();
        if gap < best.0 {
            best = (gap, depth);
        }
        if r < target {
            break;
        }
        depth += 1;
    }
    Ok((n, best.1))
}

fn sum_trees(t1: &CoverTree, t2: &CoverTree, mu: f64, budget: u64) -> Result<IntervalUnion> {
    let mut out = UnionBuilder::new();
    let mut stack: Vec<(u32, u32)> = vec![(0, 0)];
    let mut visited: u64 = 0;
    while let Some((a, b)) = stack.pop() {
        visited += 1;
        if visited > budget {
            return Err(Error::BudgetExceeded {
                what: "interval pairs",
                needed: visited as u128,
                budget: budget as u128,
            });
        }
        let (na, nb) = (&t1.nodes[a as usize], &t2.nodes[b as usize]);
        let combined = na.interval.combine(&nb.interval, mu);
        if out.covers(&combined) {
            continue;
        }
        match (na.is_leaf(), nb.is_leaf()) {
            (true, true) => out.insert(combined),
            (false, true) => stack.extend(t1.children_idx(a).map(|c| (c, b))),
            (true, false) => stack.extend(t2.children_idx(b).map(|c| (a, c))),
            (false, false) => {
                if na.interval.len() >= mu.abs() * nb.interval.len() {
                    stack.extend(t1.children_idx(a).map(|c| (c, b)));
                } else {
                    stack.extend(t2.children_idx(b).map(|c| (a, c)));
                }
            }
        }
    }
    Ok(out.finish())
}

/// Upper bound on the Lebesgue measure of the limit set.
pub fn measure_estimate(u: &IntervalUnion) -> f64 {
    u.total_length()
}

/// Default resolutions `2^-6 .. 2^-14`.
pub fn default_resolutions() -> Vec<f64> {
    (6..=14).map(|k| 2f64.powi(-k)).collect()
}

pub const DEFAULT_THETA: f64 = 0.05;

/// Covered lengths of `π_λ(K1 × K2) = K1 − λ K2` on dyadic grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionScan {
    pub lambdas: Vec<f64>,
    pub resolutions: Vec<f64>,
    /// `covered[i][j]`: covered length for `lambdas[i]` at `resolutions[j]`.
    pub covered: Vec<Vec<f64>>,
    pub theta: f64,
    pub depth: usize,
}

impl ProjectionScan {
    /// Fraction of λ whose covered length at the finest resolution exceeds `theta`.
    pub fn fraction_above(&self, theta: f64) -> f64 {
        if self.lambdas.is_empty() {
            return 0.0;
        }
        let finest = self.finest_index();
        let hits = self.covered.iter().filter(|row| row[finest] > theta).count();
        hits as f64 / self.lambdas.len() as f64
    }

    pub fn fraction_above_theta(&self) -> f64 {
        self.fraction_above(self.theta)
    }

    fn finest_index(&self) -> usize {
        self.resolutions
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }

    /// Slope of `log covered_length` against `log r` for one λ.
    pub fn slope(&self, i: usize) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .resolutions
            .iter()
            .zip(&self.covered[i])
            .map(|(r, c)| (r.ln(), c.ln()))
            .collect();
        crate::dimension::regression_slope(&pts).map(|(s, _)| s)
    }

    /// Rows `lambda,resolution,covered_length`.
    pub fn csv_rows(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for (l, row) in self.lambdas.iter().zip(&self.covered) {
            for (r, c) in self.resolutions.iter().zip(row) {
                out.push((*l, *r, *c));
            }
        }
        out
    }
}

pub fn marstrand_scan(
    k1: &RegularCantorSet,
    k2: &RegularCantorSet,
    lambdas: &[f64],
    n: usize,
    resolutions: &[f64],
    theta: f64,
    cfg: &SumConfig,
) -> Result<ProjectionScan> {
    if lambdas.iter().any(|&l| l == 0.0 || !l.is_finite()) {
        return Err(Error::invalid("projection parameters must be finite and nonzero"));
    }
    if resolutions.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::invalid("resolutions must be positive"));
    }
    let covered = lambdas
        .par_iter()
        .map(|&l| {
            let u = cover_sum_balanced(k1, k2, n, SumOp::Minus, l, cfg)?;
            Ok(resolutions
                .iter()
                .map(|&r| u.grid_cells(r) as f64 * r)
                .collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(ProjectionScan {
        lambdas: lambdas.to_vec(),
        resolutions: resolutions.to_vec(),
        covered,
        theta,
        depth: n,
    })
}

/// `count` values log-uniform in `[lo, hi]`, reproducible from `seed`.
pub fn log_uniform_lambdas(count: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|_| rng.gen_range(a..=b).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{refine, Q};
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

    fn thin() -> RegularCantorSet {
        RegularCantorSet::build_affine_full(vec![iv(0.0, 0.1), iv(0.9, 1.0)]).unwrap()
    }

    /// Unpruned merge of all pairwise sums.
    fn brute_sum(k1: &RegularCantorSet, k2: &RegularCantorSet, n: usize, mu: f64) -> IntervalUnion {
        let (c1, c2) = (refine(k1, n).unwrap(), refine(k2, n).unwrap());
        let mut all = Vec::new();
        for a in &c1.intervals {
            for b in &c2.intervals {
                all.push(a.combine(b, mu));
            }
        }
        IntervalUnion::from_intervals(all)
    }

    #[test]
    fn ternary_sum_and_difference_are_intervals() {
        for n in [1, 4, 7] {
            let s = cover_sum(&ternary(), &ternary(), n, SumOp::Plus, 1.0).unwrap();
            assert_eq!(s.intervals(), &[iv(0.0, 2.0)]);
            let d = cover_sum(&ternary(), &ternary(), n, SumOp::Minus, 1.0).unwrap();
            assert_eq!(d.intervals(), &[iv(-1.0, 1.0)]);
        }
    }

    #[test]
    fn thin_sum_depth_one_matches_enumeration() {
        let s = cover_sum(&thin(), &thin(), 1, SumOp::Plus, 1.0).unwrap();
        assert_eq!(s, brute_sum(&thin(), &thin(), 1, 1.0).with_depth(1));
        assert!(s.len() >= 2);
        assert!(s.total_length() < 2.0);
    }

    #[test]
    fn pruned_sum_equals_brute_force() {
        let a = RegularCantorSet::build_affine_full(vec![iv(0.0, 0.3), iv(0.45, 0.6), iv(0.8, 1.0)]).unwrap();
        let b = RegularCantorSet::build_affine_full(vec![iv(0.0, 0.25), iv(0.7, 1.0)]).unwrap();
        for mu in [1.0, -1.0, 0.37, -2.5] {
            let fast = sum_trees(
                &CoverTree::build(&a, Stop::Depth(4), &CoverConfig::default()).unwrap(),
                &CoverTree::build(&b, Stop::Depth(4), &CoverConfig::default()).unwrap(),
                mu,
                u64::MAX,
            )
            .unwrap();
            let slow = brute_sum(&a, &b, 4, mu);
            assert_eq!(fast.len(), slow.len(), "mu={mu}");
            for (x, y) in fast.intervals().iter().zip(slow.intervals()) {
                assert!((x.lo - y.lo).abs() < 1e-15 && (x.hi - y.hi).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn lambda_zero_collapses_to_first_cover() {
        let s = cover_sum(&thin(), &ternary(), 3, SumOp::Minus, 0.0).unwrap();
        let c = refine(&thin(), 3).unwrap();
        assert_eq!(s.intervals(), c.intervals.as_slice());
    }

    #[test]
    fn thin_difference_measure_shrinks() {
        let mut prev = f64::INFINITY;
        for n in 2..=8 {
            let m = measure_estimate(&cover_sum(&thin(), &thin(), n, SumOp::Minus, 1.0).unwrap());
            assert!(m < prev);
            prev = m;
        }
        assert!(prev < 0.2);
    }

    #[test]
    fn pair_budget_is_enforced() {
        let cfg = SumConfig {
            pair_budget: 1000,
            ..Default::default()
        };
        let err = cover_sum_depths(&thin(), &thin(), (8, 8), SumOp::Plus, 1.0, &cfg).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn balanced_depths_track_lambda() {
        let cfg = CoverConfig::default();
        assert_eq!(balanced_depths(&ternary(), &ternary(), 6, 1.0, &cfg).unwrap(), (6, 6));
        assert_eq!(balanced_depths(&ternary(), &ternary(), 6, 9.0, &cfg).unwrap(), (6, 8));
        assert_eq!(balanced_depths(&ternary(), &ternary(), 6, 1.0 / 9.0, &cfg).unwrap(), (6, 4));
    }

    #[test]
    fn marstrand_unit_lambda_covers_difference() {
        let res = [2f64.powi(-6), 2f64.powi(-10)];
        let scan = marstrand_scan(&ternary(), &ternary(), &[1.0], 6, &res, 0.05, &SumConfig::default()).unwrap();
        for c in &scan.covered[0] {
            assert!((c - 2.0).abs() <= 2.0 * 2f64.powi(-6));
        }
        assert_eq!(scan.fraction_above(1.9), 1.0);
        assert!(marstrand_scan(&ternary(), &ternary(), &[0.0], 2, &res, 0.05, &SumConfig::default()).is_err());
    }
}
