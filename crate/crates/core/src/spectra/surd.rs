//! Exact quadratic surds `(a + b √d) / c`.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

fn is_square(n: &BigInt) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

impl QuadSurd {
    /// `(a + b √d) / c` with `d > 0` not a perfect square and `c != 0`.
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>, d: impl Into<BigInt>) -> Result<Self> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        if c.is_zero() {
            return Err(Error::invalid("surd denominator is zero"));
        }
        if !d.is_positive() || is_square(&d) {
            return Err(Error::invalid("surd radicand must be a positive non-square"));
        }
        let mut s = QuadSurd { a, b, c, d };
        s.normalize();
        Ok(s)
    }

    /// `√d`.
    pub fn sqrt(d: i64) -> Result<Self> {
        Self::new(0, 1, 1, d)
    }

    fn normalize(&mut self) {
        let g = self.a.gcd(&self.b).gcd(&self.c);
        if !g.is_zero() && !g.is_one() {
            self.a /= &g;
            self.b /= &g;
            self.c /= &g;
        }
        if self.c.is_negative() {
            self.a = -&self.a;
            self.b = -&self.b;
            self.c = -&self.c;
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// `floor(b √d)` exactly.
    fn floor_root_part(&self) -> BigInt {
        let r = (&self.b * &self.b * &self.d).sqrt();
        match self.b.sign() {
            Sign::Minus => {
                let exact = &r * &r == &self.b * &self.b * &self.d;
                if exact {
                    -r
                } else {
                    -r - 1
                }
            }
            _ => r,
        }
    }

    pub fn floor(&self) -> BigInt {
        (&self.a + self.floor_root_part()).div_floor(&self.c)
    }

    pub fn sub_int(&self, m: &BigInt) -> Self {
        let mut s = QuadSurd {
            a: &self.a - m * &self.c,
            b: self.b.clone(),
            c: self.c.clone(),
            d: self.d.clone(),
        };
        s.normalize();
        s
    }

    /// `1 / self`; `None` at zero.
    pub fn recip(&self) -> Option<Self> {
        let den = &self.a * &self.a - &self.b * &self.b * &self.d;
        if den.is_zero() {
            return None;
        }
        let mut s = QuadSurd {
            a: &self.c * &self.a,
            b: -(&self.c * &self.b),
            c: den,
            d: self.d.clone(),
        };
        s.normalize();
        Some(s)
    }

    pub fn to_f64(&self) -> f64 {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::NAN);
        (f(&self.a) + f(&self.b) * f(&self.d).sqrt()) / f(&self.c)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}√{})/{}", self.a, self.b, self.d, self.c)
    }
}
