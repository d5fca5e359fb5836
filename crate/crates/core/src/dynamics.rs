//! Small dynamical systems: the affine horseshoe, the cat map and the
//! standard family.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::RegularCantorSet;
use crate::dimension::hausdorff_dimension_moran;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::spectra::QuadSurd;

const MORAN_TOL: f64 = 1e-13;

/// Two horizontal strips mapped affinely onto two vertical strips.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineHorseshoe {
    pub contraction: f64,
    pub expansion: f64,
}

impl AffineHorseshoe {
    pub fn new(contraction: f64, expansion: f64) -> Result<Self> {
        if !(contraction > 0.0 && contraction < 0.5) {
            return Err(Error::invalid("contraction must lie in (0, 1/2)"));
        }
        if !(expansion > 2.0 && expansion.is_finite()) {
            return Err(Error::invalid("expansion must exceed 2"));
        }
        Ok(AffineHorseshoe {
            contraction,
            expansion,
        })
    }
}

fn two_piece(ratio: f64) -> Result<RegularCantorSet> {
    RegularCantorSet::build_affine_full(vec![Interval::new(0.0, ratio)?, Interval::new(1.0 - ratio, 1.0)?])
}

/// `(K^s, K^u)`: pieces of length `λ_c` and `1/λ_e` at both ends of `[0, 1]`.
pub fn horseshoe_cantor_sets(h: &AffineHorseshoe) -> Result<(RegularCantorSet, RegularCantorSet)> {
    Ok((two_piece(h.contraction)?, two_piece(1.0 / h.expansion)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionRegime {
    BelowOne,
    Critical,
    AboveOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorseshoeReport {
    pub horseshoe: AffineHorseshoe,
    pub stable_dimension: f64,
    pub unstable_dimension: f64,
    /// Sum of the two factor dimensions.
    pub dimension: f64,
    pub regime: DimensionRegime,
}

pub fn horseshoe_report(h: &AffineHorseshoe) -> Result<HorseshoeReport> {
    let (ks, ku) = horseshoe_cantor_sets(h)?;
    let ds = hausdorff_dimension_moran(&ks, 0, MORAN_TOL)?.value;
    let du = hausdorff_dimension_moran(&ku, 0, MORAN_TOL)?.value;
    let dimension = ds + du;
    let regime = if (dimension - 1.0).abs() <= 1e-9 {
        DimensionRegime::Critical
    } else if dimension < 1.0 {
        DimensionRegime::BelowOne
    } else {
        DimensionRegime::AboveOne
    };
    Ok(HorseshoeReport {
        horseshoe: *h,
        stable_dimension: ds,
        unstable_dimension: du,
        dimension,
        regime,
    })
}

/// The contraction giving dimension exactly 1 for the given expansion, by
/// bisection on the Moran roots.
pub fn critical_contraction(expansion: f64) -> Result<AffineHorseshoe> {
    let du = {
        let h = AffineHorseshoe::new(0.25, expansion)?;
        horseshoe_report(&h)?.unstable_dimension
    };
    let ds = |c: f64| -> Result<f64> { Ok(hausdorff_dimension_moran(&two_piece(c)?, 0, MORAN_TOL)?.value) };
    let (mut lo, mut hi) = (1e-9, 0.5 - 1e-12);
    if ds(lo)? + du > 1.0 || ds(hi)? + du < 1.0 {
        return Err(Error::invalid("no contraction reaches dimension 1"));
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if ds(mid)? + du < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    AffineHorseshoe::new(0.5 * (lo + hi), expansion)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodCount {
    pub n: usize,
    pub enumerated: u64,
    /// `λ_u^n + λ_s^n - 2`.
    pub formula: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatMapReport {
    pub unstable_eigenvalue: String,
    pub stable_eigenvalue: String,
    pub unstable_value: f64,
    pub stable_value: f64,
    pub eigenvalue_product_is_one: bool,
    pub hyperbolic: bool,
    pub counts: Vec<PeriodCount>,
}

impl CatMapReport {
    pub fn all_counts_match(&self) -> bool {
        self.counts.iter().all(|c| c.enumerated == c.formula)
    }
}

type M2 = [[i128; 2]; 2];

fn mul(a: &M2, b: &M2) -> Option<M2> {
    let e = |i: usize, j: usize| a[i][0].checked_mul(b[0][j])?.checked_add(a[i][1].checked_mul(b[1][j])?);
    Some([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]])
}

/// `(g, x)` with `x a ≡ g (mod m)`, `g = gcd(a, m)`.
fn ext_gcd(a: i128, m: i128) -> (i128, i128) {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0, s0.rem_euclid(m))
}

/// Points `x ∈ [0, 1)²` with `B x ∈ Z²`, counted exactly.
///
/// Such points lie on the grid `Z² / D` with `D = |det B|`; for each first
/// coordinate `i / D` the second solves a linear congruence.
pub fn count_fixed_points(b: &M2, budget: u64) -> Result<u64> {
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let d = det.abs();
    if d == 0 {
        return Err(Error::invalid("A^n - I is singular"));
    }
    if d as u128 > budget as u128 {
        return Err(Error::BudgetExceeded {
            what: "lattice columns",
            needed: d as u128,
            budget: budget as u128,
        });
    }
    let mut count = 0u64;
    let (g, inv) = ext_gcd(b[0][1], d);
    let step = d / g;
    for i in 0..d {
        // b00 i + b01 j ≡ 0 (mod d)
        let rhs = (-b[0][0] * i).rem_euclid(d);
        if rhs % g != 0 {
            continue;
        }
        let j0 = ((rhs / g) * inv).rem_euclid(step);
        let mut j = j0;
        while j < d {
            if (b[1][0] * i + b[1][1] * j).rem_euclid(d) == 0 {
                count += 1;
            }
            j += step;
        }
    }
    Ok(count)
}

/// Hyperbolicity data and periodic-point counts of `(x, y) -> (2x + y, x + y)`.
pub fn cat_map_check(n_periods: usize) -> Result<CatMapReport> {
    cat_map_check_with(n_periods, 100_000_000)
}

pub fn cat_map_check_with(n_periods: usize, budget: u64) -> Result<CatMapReport> {
    if n_periods == 0 {
        return Err(Error::invalid("need at least one period"));
    }
    let a: M2 = [[2, 1], [1, 1]];
    // eigenvalues (3 ± √5) / 2 of trace 3, determinant 1
    let lu = QuadSurd::new(3, 1, 2, 5)?;
    let ls = QuadSurd::new(3, -1, 2, 5)?;
    // product of conjugates: (3² - 5) / 2² = 1
    let product_is_one = 3 * 3 - 5 == 2 * 2;
    let hyperbolic = lu.floor() >= 1.into() && ls.floor() == 0.into() && ls.to_f64() > 0.0;
    let mut counts = Vec::with_capacity(n_periods);
    let mut pow = a;
    for n in 1..=n_periods {
        if n > 1 {
            pow = mul(&pow, &a).ok_or(Error::Overflow)?;
        }
        let b: M2 = [[pow[0][0] - 1, pow[0][1]], [pow[1][0], pow[1][1] - 1]];
        let trace = pow[0][0] + pow[1][1];
        counts.push(PeriodCount {
            n,
            enumerated: count_fixed_points(&b, budget)?,
            formula: (trace - 2) as u64,
        });
    }
    Ok(CatMapReport {
        unstable_eigenvalue: "(3+√5)/2".into(),
        stable_eigenvalue: "(3-√5)/2".into(),
        unstable_value: lu.to_f64(),
        stable_value: ls.to_f64(),
        eigenvalue_product_is_one: product_is_one,
        hyperbolic,
        counts,
    })
}

pub const BURN_IN: usize = 100;
/// Exponents above this count as positive.
pub const POSITIVE_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitExponents {
    pub orbit_id: usize,
    pub top: f64,
    pub bottom: f64,
}

impl OrbitExponents {
    pub fn sum(&self) -> f64 {
        self.top + self.bottom
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub lambda: f64,
    pub mean_exponent: f64,
    pub fraction_positive: f64,
    pub max_abs_sum: f64,
    pub orbits: Vec<OrbitExponents>,
}

fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// One step of `(x, y) -> (-y + 2x + λ sin 2πx, x) mod 1`.
pub fn standard_step(lambda: f64, x: f64, y: f64) -> (f64, f64) {
    let tau = std::f64::consts::TAU;
    (frac(-y + 2.0 * x + lambda * (tau * x).sin()), x)
}

fn orbit_exponents(lambda: f64, x0: f64, y0: f64, iterates: usize) -> (f64, f64) {
    let tau = std::f64::consts::TAU;
    let (mut x, mut y) = (x0, y0);
    // orthonormal frame, columns (q00, q10) and (q01, q11)
    let mut q = [[1.0, 0.0], [0.0, 1.0]];
    let (mut s1, mut s2) = (0.0, 0.0);
    for k in 0..BURN_IN + iterates {
        let j00 = 2.0 + tau * lambda * (tau * x).cos();
        // J = [[j00, -1], [1, 0]]
        let m = [
            [j00 * q[0][0] - q[1][0], j00 * q[0][1] - q[1][1]],
            [q[0][0], q[0][1]],
        ];
        // Gram-Schmidt on the columns
        let r11 = m[0][0].hypot(m[1][0]);
        let u = [m[0][0] / r11, m[1][0] / r11];
        let r12 = u[0] * m[0][1] + u[1] * m[1][1];
        let w = [m[0][1] - r12 * u[0], m[1][1] - r12 * u[1]];
        let r22 = w[0].hypot(w[1]);
        q = [[u[0], w[0] / r22], [u[1], w[1] / r22]];
        if k >= BURN_IN {
            s1 += r11.ln();
            s2 += r22.ln();
        }
        (x, y) = standard_step(lambda, x, y);
    }
    (s1 / iterates as f64, s2 / iterates as f64)
}

/// Lyapunov exponents of random orbits; orbit `i` draws its start from
/// stream `i` of a generator seeded with `seed`.
pub fn standard_family_lyapunov(lambda: f64, orbits: usize, iterates: usize, seed: u64) -> Result<LyapunovReport> {
    if orbits == 0 || iterates == 0 {
        return Err(Error::invalid("need at least one orbit and one iterate"));
    }
    if !lambda.is_finite() {
        return Err(Error::invalid("lambda must be finite"));
    }
    let list: Vec<OrbitExponents> = (0..orbits)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (x0, y0) = (rng.gen::<f64>(), rng.gen::<f64>());
            let (top, bottom) = orbit_exponents(lambda, x0, y0, iterates);
            OrbitExponents {
                orbit_id: i,
                top,
                bottom,
            }
        })
        .collect();
    let mean = list.iter().map(|o| o.top).sum::<f64>() / orbits as f64;
    let positive = list.iter().filter(|o| o.top > POSITIVE_THRESHOLD).count();
    let max_abs_sum = list.iter().map(|o| o.sum().abs()).fold(0.0, f64::max);
    Ok(LyapunovReport {
        lambda,
        mean_exponent: mean,
        fraction_positive: positive as f64 / orbits as f64,
        max_abs_sum,
        orbits: list,
    })
}
