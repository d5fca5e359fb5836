//! Continued fractions and the Lagrange spectrum.

mod spectrum;
mod surd;

pub use spectrum::{
    hall_halfline_probe, k_alpha, lagrange_sample, lagrange_sample_with, periodic_k, ExactK, HallHit,
    SpectrumValue, DEFAULT_WINDOW, ESTIMATOR_TOL, LAGRANGE_BUDGET,
};
pub use surd::QuadSurd;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Digit = u64;

/// A digit generator, `index -> a_{index + 1}`.
#[derive(Clone)]
pub struct Stream(pub Arc<dyn Fn(usize) -> Digit + Send + Sync>);

impl fmt::Debug for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Stream(..)")
    }
}

impl PartialEq for Stream {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tail {
    /// The expansion ends after `digits`.
    Finite,
    /// `digits` followed by this block forever.
    Periodic(Vec<Digit>),
    /// Digits after the prefix come from a generator.
    Streamed(Stream),
    /// Expansion stopped; later digits were not computed.
    Unknown,
}

/// Partial quotients `a_1, a_2, ...` of `[0; a_1, a_2, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CFSequence {
    pub digits: Vec<Digit>,
    pub tail: Tail,
}

fn check_digits(d: &[Digit]) -> Result<()> {
    if d.contains(&0) {
        return Err(Error::invalid("continued-fraction digits must be >= 1"));
    }
    Ok(())
}

impl CFSequence {
    pub fn finite(digits: Vec<Digit>) -> Result<Self> {
        check_digits(&digits)?;
        Ok(CFSequence {
            digits,
            tail: Tail::Finite,
        })
    }

    pub fn periodic(prefix: Vec<Digit>, period: Vec<Digit>) -> Result<Self> {
        check_digits(&prefix)?;
        check_digits(&period)?;
        if period.is_empty() {
            return Err(Error::invalid("period must be nonempty"));
        }
        Ok(CFSequence {
            digits: prefix,
            tail: Tail::Periodic(period),
        })
    }

    pub fn streamed(prefix: Vec<Digit>, f: impl Fn(usize) -> Digit + Send + Sync + 'static) -> Result<Self> {
        check_digits(&prefix)?;
        Ok(CFSequence {
            digits: prefix,
            tail: Tail::Streamed(Stream(Arc::new(f))),
        })
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.tail, Tail::Periodic(_) | Tail::Streamed(_))
    }

    /// `a_{i+1}` (zero-based), if known.
    pub fn digit(&self, i: usize) -> Option<Digit> {
        if let Some(&d) = self.digits.get(i) {
            return Some(d);
        }
        let j = i - self.digits.len();
        match &self.tail {
            Tail::Periodic(p) => Some(p[j % p.len()]),
            Tail::Streamed(s) => {
                let d = (s.0)(i);
                (d >= 1).then_some(d)
            }
            Tail::Finite | Tail::Unknown => None,
        }
    }

    /// Up to `n` leading digits.
    pub fn take(&self, n: usize) -> Vec<Digit> {
        (0..n).map_while(|i| self.digit(i)).collect()
    }

    pub fn period(&self) -> Option<&[Digit]> {
        match &self.tail {
            Tail::Periodic(p) => Some(p),
            _ => None,
        }
    }

    /// Compact text: `1,2;3,4` for prefix `1,2` then period `3,4` repeated.
    pub fn notation(&self) -> String {
        let join = |d: &[Digit]| d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match &self.tail {
            Tail::Periodic(p) => format!("{};{}", join(&self.digits), join(p)),
            Tail::Finite => join(&self.digits),
            Tail::Streamed(_) | Tail::Unknown => format!("{},...", join(&self.digits)),
        }
    }
}

impl Serialize for CFSequence {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CFSequence", 3)?;
        st.serialize_field("digits", &self.digits)?;
        let (kind, period): (&str, Option<&Vec<Digit>>) = match &self.tail {
            Tail::Finite => ("finite", None),
            Tail::Periodic(p) => ("periodic", Some(p)),
            Tail::Streamed(_) => ("streamed", None),
            Tail::Unknown => ("unknown", None),
        };
        st.serialize_field("tail", kind)?;
        st.serialize_field("period", &period)?;
        st.end()
    }
}

/// Inputs to [`cf_expand`].
#[derive(Debug, Clone, PartialEq)]
pub enum CfInput {
    /// Treated as uncertain by one unit in the last place.
    Float(f64),
    Rational(BigRational),
    Surd(QuadSurd),
}

/// Digits of the fractional part of `x`.
///
/// Exact inputs expand exactly (surds stop at the first repeated state and
/// report the period). Floats are expanded at both ends of their uncertainty
/// interval and only digits on which the ends agree are returned.
pub fn cf_expand(x: &CfInput, n: usize) -> Result<CFSequence> {
    if n == 0 {
        return Err(Error::invalid("need at least one digit"));
    }
    match x {
        CfInput::Rational(q) => Ok(expand_rational(q, n)),
        CfInput::Surd(s) => expand_surd(s, n),
        CfInput::Float(v) => expand_float(*v, n),
    }
}

fn expand_rational(q: &BigRational, n: usize) -> CFSequence {
    let mut x = q - q.floor();
    let mut digits = Vec::new();
    while !x.is_zero() {
        if digits.len() == n {
            return CFSequence {
                digits,
                tail: Tail::Unknown,
            };
        }
        let y = x.recip();
        let a = y.floor();
        digits.push(a.to_integer().to_u64().unwrap_or(u64::MAX));
        x = y - a;
    }
    CFSequence {
        digits,
        tail: Tail::Finite,
    }
}

fn expand_surd(s: &QuadSurd, n: usize) -> Result<CFSequence> {
    let mut x = s.sub_int(&s.floor());
    let mut seen: HashMap<QuadSurd, usize> = HashMap::new();
    let mut digits: Vec<Digit> = Vec::new();
    while digits.len() < n {
        if let Some(&start) = seen.get(&x) {
            let period = digits.split_off(start);
            return Ok(CFSequence {
                digits,
                tail: Tail::Periodic(period),
            });
        }
        seen.insert(x.clone(), digits.len());
        let y = x.recip().ok_or(Error::invalid("surd expansion hit zero"))?;
        let a = y.floor();
        digits.push(a.to_u64().ok_or(Error::Overflow)?);
        x = y.sub_int(&a);
    }
    Ok(CFSequence {
        digits,
        tail: Tail::Unknown,
    })
}

fn expand_float(v: f64, n: usize) -> Result<CFSequence> {
    if !v.is_finite() {
        return Err(Error::invalid("cannot expand a non-finite value"));
    }
    let exact = |f: f64| BigRational::from_float(f).expect("finite");
    let (mut lo, mut hi) = (exact(v.next_down()), exact(v.next_up()));
    let (fl, fh) = (lo.floor(), hi.floor());
    if fl != fh {
        return Err(Error::PrecisionExhausted(0));
    }
    lo -= &fl;
    hi -= &fh;
    let mut digits = Vec::new();
    while digits.len() < n {
        if lo.is_zero() || hi.is_zero() {
            return Err(Error::PrecisionExhausted(digits.len()));
        }
        let (ylo, yhi) = (lo.recip(), hi.recip());
        let (a, b) = (ylo.floor(), yhi.floor());
        if a != b {
            return Err(Error::PrecisionExhausted(digits.len()));
        }
        digits.push(a.to_integer().to_u64().ok_or(Error::Overflow)?);
        lo = ylo - &a;
        hi = yhi - b;
    }
    Ok(CFSequence {
        digits,
        tail: Tail::Unknown,
    })
}

/// `p/q = [0; a_1, ..., a_n]` by the continuant recursion.
pub fn cf_value(digits: &[Digit]) -> Result<(u128, u128)> {
    check_digits(digits)?;
    let (mut p0, mut q0, mut p1, mut q1) = (1u128, 0u128, 0u128, 1u128);
    for &a in digits {
        let a = a as u128;
        let p = a.checked_mul(p1).and_then(|x| x.checked_add(p0)).ok_or(Error::Overflow)?;
        let q = a.checked_mul(q1).and_then(|x| x.checked_add(q0)).ok_or(Error::Overflow)?;
        (p0, q0, p1, q1) = (p1, q1, p, q);
    }
    Ok((p1, q1))
}

/// [`cf_value`] without an overflow limit.
pub fn cf_value_big(digits: &[Digit]) -> Result<(BigUint, BigUint)> {
    check_digits(digits)?;
    let (mut p0, mut q0, mut p1, mut q1) = (BigUint::one(), BigUint::zero(), BigUint::zero(), BigUint::one());
    for &a in digits {
        let p = &p1 * a + &p0;
        let q = &q1 * a + &q0;
        (p0, q0, p1, q1) = (p1, q1, p, q);
    }
    Ok((p1, q1))
}

/// Convergents `p_k / q_k` for `k = 0..=n` of `[0; a_1, ...]`.
pub(crate) fn convergents(digits: &[Digit]) -> Vec<(BigInt, BigInt)> {
    let mut out = vec![(BigInt::zero(), BigInt::one())];
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    for &a in digits {
        let (p1, q1) = out.last().cloned().expect("nonempty");
        let p = &p1 * a + &p0;
        let q = &q1 * a + &q0;
        (p0, q0) = (p1, q1);
        out.push((p, q));
    }
    out
}
