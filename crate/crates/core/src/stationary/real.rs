//! Arbitrary-precision reals over `astro_float::BigFloat`, carrying their precision.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num::bigint::BigInt;

use crate::series::Rat;

const RM: RoundingMode = RoundingMode::ToEven;

/// Default working precision in bits.
pub const DEFAULT_PREC: usize = 256;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

#[derive(Clone, Debug)]
pub struct Real {
    v: BigFloat,
    prec: usize,
}

impl Real {
    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn from_i64(n: i64, prec: usize) -> Self {
        Real { v: BigFloat::from_i64(n, prec), prec }
    }

    pub fn from_f64(f: f64, prec: usize) -> Self {
        Real { v: BigFloat::from_f64(f, prec), prec }
    }

    pub fn from_bigint(n: &BigInt, prec: usize) -> Self {
        let v = CONSTS.with(|cc| {
            BigFloat::parse(&n.to_string(), Radix::Dec, prec + 64, RM, &mut cc.borrow_mut())
        });
        Real { v, prec }
    }

    pub fn from_rat(r: &Rat, prec: usize) -> Self {
        let n = Self::from_bigint(r.numer(), prec);
        let d = Self::from_bigint(r.denom(), prec);
        &n / &d
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_i64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_i64(1, prec)
    }

    /// Square root; `None` for negative arguments.
    pub fn sqrt(&self) -> Option<Self> {
        if self.v.is_negative() && !self.v.is_zero() {
            return None;
        }
        Some(Real { v: self.v.sqrt(self.prec, RM), prec: self.prec })
    }

    pub fn abs(&self) -> Self {
        Real { v: self.v.abs(), prec: self.prec }
    }

    pub fn powi(&self, n: usize) -> Self {
        Real { v: self.v.powi(n, self.prec, RM), prec: self.prec }
    }

    pub fn recip(&self) -> Self {
        Real { v: self.v.reciprocal(self.prec, RM), prec: self.prec }
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn max(&self, o: &Self) -> Self {
        if self >= o { self.clone() } else { o.clone() }
    }

    pub fn min(&self, o: &Self) -> Self {
        if self <= o { self.clone() } else { o.clone() }
    }

    /// Nearest `f64`, through the decimal rendering.
    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        self.to_string().parse().unwrap_or(f64::NAN)
    }

    /// `2^(1 - prec)`, the unit of the working precision.
    pub fn epsilon(prec: usize) -> Self {
        let two = Self::from_i64(2, prec);
        two.powi(prec - 1).recip()
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        let s = self.to_string();
        let (mant, exp) = s.split_once('e').unwrap_or((&s, "0"));
        let neg = mant.starts_with('-');
        let body: String = mant.trim_start_matches('-').chars().filter(|c| *c != '.').collect();
        let mut kept: String = body.chars().take(digits.max(1)).collect();
        while kept.len() < digits.max(1) {
            kept.push('0');
        }
        let exp: i64 = exp.trim_start_matches('+').parse().unwrap_or(0);
        let (head, tail) = kept.split_at(1);
        let sign = if neg { "-" } else { "" };
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl PartialEq for Real {
    fn eq(&self, o: &Self) -> bool {
        self.partial_cmp(o) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        self.v.cmp(&o.v).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for &Real {
            type Output = Real;
            fn $m(self, o: &Real) -> Real {
                let prec = self.prec.max(o.prec);
                Real { v: self.v.$m(&o.v, prec, RM), prec }
            }
        }
        impl $tr for Real {
            type Output = Real;
            fn $m(self, o: Real) -> Real {
                (&self).$m(&o)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, o: &Real) -> Real {
                (&self).$m(o)
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $m(self, o: Real) -> Real {
                self.$m(&o)
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { v: -self.v.clone(), prec: self.prec }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn rational_roundtrip() {
        let third = Real::from_rat(&rat(1, 3), 256);
        let back = &third * &Real::from_i64(3, 256);
        let err = (&back - &Real::one(256)).abs();
        assert!(err < Real::epsilon(250));
        assert!((third.to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn sqrt_two() {
        let s = Real::from_i64(2, 256).sqrt().unwrap();
        let e = (&(&s * &s) - &Real::from_i64(2, 256)).abs();
        assert!(e < Real::epsilon(250));
        assert!(Real::from_i64(-1, 64).sqrt().is_none());
        assert_eq!(s.to_sci(6), "1.41421e0");
    }

    #[test]
    fn ordering() {
        let a = Real::from_rat(&rat(1, 7), 128);
        let b = Real::from_rat(&rat(1, 6), 128);
        assert!(a < b);
        assert_eq!(a.max(&b), b);
    }
}
