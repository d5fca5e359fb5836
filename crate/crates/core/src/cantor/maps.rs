//! Branch maps and their compositions.
//!
//! Affine maps carry an exact rational form whenever their coefficients are
//! recognisable as small rationals; Möbius maps are integer matrices and are
//! only evaluated in floating point at the very end.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::interval::Interval;

/// Exact rationals used for affine endpoint arithmetic.
pub type Q = Ratio<i128>;

const RECOGNIZE_MAX_DEN: i128 = 1_000_000;

/// Returns `p/q` with `q <= 10^6` whose nearest double is exactly `x`.
pub fn recognize_rational(x: f64) -> Option<Q> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let a = a as i128;
        let p2 = a.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a.checked_mul(q1)?.checked_add(q0)?;
        if q2 > RECOGNIZE_MAX_DEN {
            return None;
        }
        if (p2 as f64) / (q2 as f64) == x {
            return Some(Q::new(p2, q2));
        }
        let frac = r - a as f64;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

pub(crate) fn q_to_f64(q: &Q) -> f64 {
    q.to_f64()
        .unwrap_or_else(|| *q.numer() as f64 / *q.denom() as f64)
}

/// `x -> slope * x + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub slope: f64,
    pub offset: f64,
    #[serde(skip)]
    pub(crate) exact: Option<(Q, Q)>,
}

impl AffineMap {
    pub fn new(slope: f64, offset: f64) -> Self {
        let exact = recognize_rational(slope).zip(recognize_rational(offset));
        AffineMap {
            slope,
            offset,
            exact,
        }
    }

    pub fn from_exact(slope: Q, offset: Q) -> Self {
        AffineMap {
            slope: q_to_f64(&slope),
            offset: q_to_f64(&offset),
            exact: Some((slope, offset)),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        self.slope * x + self.offset
    }

    pub fn inverse(&self) -> AffineMap {
        let exact = self.exact.as_ref().and_then(|(s, o)| {
            let inv = Q::one().checked_div(s)?;
            let off = Q::zero().checked_sub(&o.checked_mul(&inv)?)?;
            Some((inv, off))
        });
        match exact {
            Some((s, o)) => AffineMap::from_exact(s, o),
            None => AffineMap {
                slope: 1.0 / self.slope,
                offset: -self.offset / self.slope,
                exact: None,
            },
        }
    }
}

/// `x -> (a x + b) / (c x + d)` with integer entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mobius {
    pub a: i128,
    pub b: i128,
    pub c: i128,
    pub d: i128,
}

impl Mobius {
    pub const IDENTITY: Mobius = Mobius {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };

    pub fn det(&self) -> i128 {
        self.a * self.d - self.b * self.c
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        (self.a as f64 * x + self.b as f64) / (self.c as f64 * x + self.d as f64)
    }

    /// Absolute derivative at `x`.
    pub fn abs_derivative(&self, x: f64) -> f64 {
        let den = self.c as f64 * x + self.d as f64;
        (self.det() as f64).abs() / (den * den)
    }

    pub fn inverse(&self) -> Mobius {
        Mobius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self ∘ other`, or `None` on overflow.
    pub fn compose(&self, other: &Mobius) -> Option<Mobius> {
        let m = |x: i128, y: i128, z: i128, w: i128| x.checked_mul(y)?.checked_add(z.checked_mul(w)?);
        Some(Mobius {
            a: m(self.a, other.a, self.b, other.c)?,
            b: m(self.a, other.b, self.b, other.d)?,
            c: m(self.c, other.a, self.d, other.c)?,
            d: m(self.c, other.b, self.d, other.d)?,
        })
    }

    /// Whether the pole `-d/c` stays off `iv`.
    pub fn regular_on(&self, iv: &Interval) -> bool {
        let f = |x: f64| self.c as f64 * x + self.d as f64;
        let (l, h) = (f(iv.lo), f(iv.hi));
        l != 0.0 && h != 0.0 && (l > 0.0) == (h > 0.0)
    }
}

/// A composition of inverse branches, applied to piece endpoints.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Chart {
    Affine(AffineMap),
    Mobius(Mobius),
}

impl Chart {
    pub(crate) fn identity_affine() -> Chart {
        Chart::Affine(AffineMap::from_exact(Q::one(), Q::zero()))
    }

    /// `self ∘ inner`; `None` if the Möbius entries overflow.
    pub(crate) fn then_inner(&self, inner: &Chart) -> Option<Chart> {
        match (self, inner) {
            (Chart::Affine(outer), Chart::Affine(inner)) => {
                let exact = outer.exact.as_ref().zip(inner.exact.as_ref()).and_then(
                    |((a, b), (c, d))| {
                        let slope = a.checked_mul(c)?;
                        let offset = a.checked_mul(d)?.checked_add(b)?;
                        Some((slope, offset))
                    },
                );
                Some(Chart::Affine(match exact {
                    Some((s, o)) => AffineMap::from_exact(s, o),
                    None => AffineMap {
                        slope: outer.slope * inner.slope,
                        offset: outer.slope * inner.offset + outer.offset,
                        exact: None,
                    },
                }))
            }
            (Chart::Mobius(outer), Chart::Mobius(inner)) => outer.compose(inner).map(Chart::Mobius),
            // sets never mix branch kinds
            _ => None,
        }
    }

    /// Image of a piece, using exact endpoints when both sides have them.
    pub(crate) fn apply_piece(&self, piece: &Interval, exact: Option<&(Q, Q)>) -> Interval {
        match self {
            Chart::Affine(map) => {
                if let (Some((s, o)), Some((lo, hi))) = (map.exact.as_ref(), exact) {
                    let img = |x: &Q| s.checked_mul(x).and_then(|v| v.checked_add(o));
                    if let (Some(a), Some(b)) = (img(lo), img(hi)) {
                        return Interval::spanning(q_to_f64(&a), q_to_f64(&b));
                    }
                }
                Interval::spanning(map.apply(piece.lo), map.apply(piece.hi))
            }
            Chart::Mobius(m) => Interval::spanning(m.apply(piece.lo), m.apply(piece.hi)),
        }
    }
}
