//! Rational helpers on top of `num`'s `BigRational`.

use num::bigint::{BigInt, Sign};
use num::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact coefficient type. Always reduced, with a positive denominator.
pub type Rat = num::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"a/b"` or `"a"`. Decimal points are refused so that
/// probabilities never pass through a float.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}, expected a/b"));
    if s.contains(['.', 'e', 'E']) {
        return Err(bad());
    }
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(n, d))
}

/// `"num/den"`, also for integers, so golden files have one shape.
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Exact nonnegative square root of a rational, if it exists.
pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &sn * &sn == *n && &sd * &sd == *d {
        Some(Rat::new(
            BigInt::from_biguint(Sign::Plus, sn),
            BigInt::from_biguint(Sign::Plus, sd),
        ))
    } else {
        None
    }
}

pub fn rat_pow(r: &Rat, k: i64) -> Rat {
    if k >= 0 {
        num::pow(r.clone(), k as usize)
    } else {
        num::pow(r.recip(), (-k) as usize)
    }
}

/// Lossy conversion, used only for reporting and numeric comparisons.
pub fn rat_to_f64(r: &Rat) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale both down by shifting.
        let n = r.numer();
        let d = r.denom();
        let shift = n.bits().max(d.bits()).saturating_sub(900);
        let ns: BigInt = n >> shift;
        let ds: BigInt = d >> shift;
        ns.to_f64().unwrap_or(0.0) / ds.to_f64().unwrap_or(1.0)
    })
}

pub fn is_one(r: &Rat) -> bool {
    r.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rat("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rat(" -4/6 ").unwrap(), rat(-2, 3));
        assert_eq!(parse_rat("5").unwrap(), rat_int(5));
        assert!(parse_rat("0.25").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn sqrt_of_squares_only() {
        assert_eq!(rat_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rat_sqrt(&rat(2, 1)), None);
        assert_eq!(rat_sqrt(&rat(-1, 1)), None);
        assert_eq!(rat_sqrt(&rat(0, 1)), Some(rat(0, 1)));
    }

    #[test]
    fn canonical_form() {
        let r = rat(6, -4);
        assert_eq!(fmt_rat(&r), "-3/2");
        assert_eq!(fmt_rat(&rat_int(0)), "0/1");
    }
}
