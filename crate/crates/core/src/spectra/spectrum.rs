//! Best-approximation constants `k(α)` and samples of the Lagrange spectrum.
//!
//! For a purely periodic block with period matrix `M = Π [[a, 1], [1, 0]]`
//! the forward tail `x = [a_n; a_{n+1}, ...]` is the attracting fixed point
//! of `M` and the backward part `[0; a_{n-1}, ...]` is `-x̄`, so the
//! two-sided value is `x - x̄ = √(tr² - 4 det) / Q` with `Q` the lower-left
//! entry of the rotated matrix. Hence `k² = Δ / Q_min²` is rational.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::{convergents, CFSequence, Digit, Tail};
use crate::cantor::{Cursor, RegularCantorSet};
use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 64;
/// Largest allowed gap between the direct and tail estimators.
pub const ESTIMATOR_TOL: f64 = 1e-9;
/// Words enumerated by [`lagrange_sample`] before giving up.
pub const LAGRANGE_BUDGET: u64 = 20_000_000;

/// `k` stored through its square, which is rational for periodic sequences.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactK {
    pub squared: BigRational,
}

impl ExactK {
    pub fn value(&self) -> f64 {
        self.squared.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// `f√s/q` with `s` square-free as far as trial division goes.
    pub fn closed_form(&self) -> String {
        let (n, d) = (self.squared.numer(), self.squared.denom());
        // k = √(n d) / d
        let mut rad = n * d;
        let mut out = BigInt::one();
        let mut p = BigInt::from(2);
        let limit = BigInt::from(100_000);
        while p <= limit && &p * &p <= rad {
            let pp = &p * &p;
            while (&rad % &pp).is_zero() {
                rad /= &pp;
                out *= &p;
            }
            p += 1;
        }
        let g = out.gcd(d);
        let (f, q) = (&out / &g, d / &g);
        let root = if rad.is_one() { String::new() } else { format!("√{rad}") };
        let head = match (f.is_one(), root.is_empty()) {
            (true, true) => "1".to_string(),
            (true, false) => root,
            (false, _) => format!("{f}{root}"),
        };
        if q.is_one() {
            head
        } else {
            format!("{head}/{q}")
        }
    }
}

impl Serialize for ExactK {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ExactK", 2)?;
        st.serialize_field("squared", &self.squared.to_string())?;
        st.serialize_field("closed_form", &self.closed_form())?;
        st.end()
    }
}

type Mat = [[BigInt; 2]; 2];

fn mat_of(word: &[Digit], start: usize) -> Mat {
    let mut m: Mat = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
    for i in 0..word.len() {
        let a = BigInt::from(word[(start + i) % word.len()]);
        // m * [[a, 1], [1, 0]]
        m = [
            [&m[0][0] * &a + &m[0][1], m[0][0].clone()],
            [&m[1][0] * &a + &m[1][1], m[1][0].clone()],
        ];
    }
    m
}

fn discriminant(m: &Mat) -> BigInt {
    let tr = &m[0][0] + &m[1][1];
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    &tr * &tr - BigInt::from(4) * det
}

/// Exact two-sided `k` of the bi-infinite repetition of `period`.
pub fn periodic_k(period: &[Digit]) -> Result<ExactK> {
    if period.is_empty() || period.contains(&0) {
        return Err(Error::invalid("period must be nonempty with digits >= 1"));
    }
    let delta = discriminant(&mat_of(period, 0));
    let q = (0..period.len())
        .map(|r| mat_of(period, r)[1][0].clone())
        .min()
        .expect("nonempty");
    Ok(ExactK {
        squared: BigRational::new(delta, &q * &q),
    })
}

/// Forward tail `[a_r; a_{r+1}, ...]` of the periodic block started at `r`.
fn rotation_tail(period: &[Digit], r: usize) -> f64 {
    let m = mat_of(period, r);
    let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
    let delta = f(&discriminant(&m));
    (f(&m[0][0]) - f(&m[1][1]) + delta.sqrt()) / (2.0 * f(&m[1][0]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumValue {
    pub value: f64,
    pub exact: Option<ExactK>,
    pub witness: CFSequence,
    pub window: usize,
    /// Maxima of the two estimators over the tail window.
    pub direct: f64,
    pub tail: f64,
    /// Index `n` attaining the tail maximum.
    pub argmax: usize,
}

/// `k(α) = limsup |q (q α - p)|^{-1}` for `α = [0; a_1, a_2, ...]`.
///
/// Both estimators are maximised over the last stretch of indices up to
/// `window` (one period, or the upper half for streamed input):
/// (a) `1 / (q_n |q_n α - p_n|)` with exact convergents,
/// (b) `[a_{n+1}; a_{n+2}, ...] + [0; a_n, ..., a_1]`.
pub fn k_alpha(seq: &CFSequence, window: usize) -> Result<SpectrumValue> {
    if window < 2 {
        return Err(Error::invalid("window must be at least 2"));
    }
    let (span, lookahead) = match &seq.tail {
        Tail::Periodic(p) => (p.len(), 2 * p.len() + 48),
        Tail::Streamed(_) => ((window / 2).max(1), 64),
        Tail::Finite | Tail::Unknown => {
            return Err(Error::invalid("k(α) needs an infinite digit sequence"))
        }
    };
    let m = window + lookahead;
    let digits = seq.take(m);
    if digits.len() < m {
        return Err(Error::PrecisionExhausted(digits.len()));
    }
    let conv = convergents(&digits);
    let alpha = BigRational::new(conv[m].0.clone(), conv[m].1.clone());
    let prefix = seq.digits.len();
    let first = (window + 1).saturating_sub(span).max(1);
    let mut best = (f64::NEG_INFINITY, f64::NEG_INFINITY, first);
    for n in first..=window {
        let (p, q) = (&conv[n].0, &conv[n].1);
        let err = (BigRational::from(q.clone()) * &alpha - BigRational::from(p.clone())).abs();
        if err.is_zero() {
            return Err(Error::PrecisionExhausted(n));
        }
        let direct = (BigRational::from(q.clone()) * err).recip().to_f64().unwrap_or(f64::NAN);
        // digits[n] is a_{n+1}
        let forward = match &seq.tail {
            Tail::Periodic(per) if n >= prefix => rotation_tail(per, (n - prefix) % per.len()),
            _ => digits[n..].iter().rev().fold(0.0, |acc, &a| {
                if acc == 0.0 {
                    a as f64
                } else {
                    a as f64 + 1.0 / acc
                }
            }),
        };
        let back = BigRational::new(conv[n - 1].1.clone(), q.clone()).to_f64().unwrap_or(f64::NAN);
        let tail = forward + back;
        best.0 = best.0.max(direct);
        if tail > best.1 {
            best.1 = tail;
            best.2 = n;
        }
    }
    let (direct, tail, argmax) = best;
    if !((direct - tail).abs() <= ESTIMATOR_TOL) {
        return Err(Error::EstimatorMismatch { direct, tail });
    }
    let exact = seq.period().map(periodic_k).transpose()?;
    Ok(SpectrumValue {
        value: exact.as_ref().map_or(tail, ExactK::value),
        exact,
        witness: seq.clone(),
        window,
        direct,
        tail,
        argmax,
    })
}

/// Lyndon words of length `<= n` over `1..=k`, in lexicographic order.
fn lyndon_words(n: usize, k: Digit) -> Vec<Vec<Digit>> {
    let mut out = Vec::new();
    let mut w: Vec<Digit> = vec![1];
    loop {
        out.push(w.clone());
        let m = w.len();
        while w.len() < n {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&k) {
            w.pop();
        }
        match w.last_mut() {
            Some(x) => *x += 1,
            None => break,
        }
    }
    out
}

pub fn lagrange_sample(max_period: usize, digit_bound: Digit) -> Result<Vec<SpectrumValue>> {
    lagrange_sample_with(max_period, digit_bound, LAGRANGE_BUDGET)
}

/// Distinct `k` values of periodic sequences, sorted, one witness each
/// (the least minimal rotation).
pub fn lagrange_sample_with(max_period: usize, digit_bound: Digit, budget: u64) -> Result<Vec<SpectrumValue>> {
    if max_period == 0 || digit_bound == 0 {
        return Err(Error::invalid("need max_period >= 1 and digit_bound >= 1"));
    }
    let total = (1..=max_period as u32)
        .try_fold(0u64, |acc, p| digit_bound.checked_pow(p).and_then(|x| acc.checked_add(x)))
        .unwrap_or(u64::MAX);
    if total > budget {
        return Err(Error::BudgetExceeded {
            what: "periodic words",
            needed: total as u128,
            budget: budget as u128,
        });
    }
    let words = lyndon_words(max_period, digit_bound);
    let mut values = words
        .into_par_iter()
        .map(|w| k_alpha(&CFSequence::periodic(vec![], w)?, DEFAULT_WINDOW))
        .collect::<Result<Vec<_>>>()?;
    values.sort_by(|a, b| a.exact.cmp(&b.exact));
    values.dedup_by(|b, a| a.exact == b.exact);
    Ok(values)
}

/// Right end of `C(4) + C(4)`.
const HALL_HI: f64 = 4.0 * (std::f64::consts::SQRT_2 - 1.0);
const HALL_BEAM: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HallHit {
    pub target: f64,
    pub marker: Digit,
    pub value: f64,
    pub hit_distance: f64,
    pub witness: CFSequence,
}

/// Builds periodic sequences `A, b_1..b_d, c_d..c_1` whose `k` lands near
/// each target: `[A; b, ...] + [0; c, ...] = A + x + y` with `x, y` in the
/// set of continued fractions with digits at most 4 and `x + y = t - A`.
pub fn hall_halfline_probe(targets: &[f64], depth: usize) -> Result<Vec<HallHit>> {
    if let Some(t) = targets.iter().find(|t| !(**t >= 6.0 && t.is_finite())) {
        return Err(Error::invalid(format!("half-line targets must be >= 6, got {t}")));
    }
    let c4 = RegularCantorSet::gauss(4)?;
    let digit = |c: &Cursor| 4 - c.state as Digit;
    targets
        .par_iter()
        .map(|&t| {
            let marker = (t - HALL_HI).ceil();
            let s = t - marker;
            let hits = |a: &Cursor, b: &Cursor| {
                a.interval.lo + b.interval.lo <= s + 1e-12 && s <= a.interval.hi + b.interval.hi + 1e-12
            };
            let pieces = Cursor::pieces(&c4);
            let mut pairs: Vec<(Cursor, Vec<Digit>, Cursor, Vec<Digit>)> = Vec::new();
            for a in &pieces {
                for b in &pieces {
                    if hits(a, b) {
                        pairs.push((a.clone(), vec![digit(a)], b.clone(), vec![digit(b)]));
                    }
                }
            }
            for _ in 1..depth {
                let mut next = Vec::new();
                for (a, da, b, db) in &pairs {
                    let (ka, kb) = (a.children(&c4, 0.0)?, b.children(&c4, 0.0)?);
                    for x in &ka {
                        for y in &kb {
                            if hits(x, y) {
                                let mut dx = da.clone();
                                dx.push(digit(x));
                                let mut dy = db.clone();
                                dy.push(digit(y));
                                next.push((x.clone(), dx, y.clone(), dy));
                            }
                        }
                    }
                    if next.len() >= HALL_BEAM {
                        break;
                    }
                }
                next.truncate(HALL_BEAM);
                if next.is_empty() {
                    break;
                }
                pairs = next;
            }
            let mut best: Option<HallHit> = None;
            for (_, b, _, c) in &pairs {
                let mut word = vec![marker as Digit];
                word.extend(b);
                word.extend(c.iter().rev());
                let k = periodic_k(&word)?.value();
                let d = (k - t).abs();
                if best.as_ref().is_none_or(|h| d < h.hit_distance) {
                    best = Some(HallHit {
                        target: t,
                        marker: marker as Digit,
                        value: k,
                        hit_distance: d,
                        witness: CFSequence::periodic(vec![], word)?,
                    });
                }
            }
            Ok(best.unwrap_or(HallHit {
                target: t,
                marker: marker as Digit,
                value: f64::NAN,
                hit_distance: f64::INFINITY,
                witness: CFSequence::periodic(vec![], vec![marker as Digit])?,
            }))
        })
        .collect()
}
