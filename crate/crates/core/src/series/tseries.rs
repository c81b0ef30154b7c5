//! Truncated Laurent series in `t` whose coefficients are Laurent polynomials in `x`.
//!
//! A series is stored as a valuation, a dense run of coefficients and an
//! absolute precision: every coefficient of `t^n` with `n < prec` is known,
//! nothing above is. Exact objects (polynomials in `t`) carry the sentinel
//! precision [`EXACT`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, Zero};

use super::lpoly::LPoly;
use super::rat::{rat, rat_pow, rat_sqrt, Rat};
use crate::error::{Error, Result};

/// Precision of series known exactly (finite in `t`).
pub const EXACT: i64 = i64::MAX / 4;

fn prec_add(a: i64, b: i64) -> i64 {
    if a >= EXACT || b >= EXACT {
        EXACT
    } else {
        (a + b).min(EXACT)
    }
}

/// Selects part of every `t`-coefficient by the sign of its `x`-exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XPart {
    Positive,
    Negative,
    NonNegative,
    NonPositive,
}

impl XPart {
    fn keeps(self, e: i64) -> bool {
        match self {
            XPart::Positive => e > 0,
            XPart::Negative => e < 0,
            XPart::NonNegative => e >= 0,
            XPart::NonPositive => e <= 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TSeries {
    val: i64,
    coeffs: Vec<LPoly>,
    prec: i64,
}

impl TSeries {
    /// Builds and normalises a series from coefficients starting at `t^val`.
    pub fn new(val: i64, coeffs: Vec<LPoly>, prec: i64) -> Self {
        let mut s = TSeries { val, coeffs, prec };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let keep = if self.prec >= EXACT {
            self.coeffs.len()
        } else {
            (self.prec - self.val).clamp(0, self.coeffs.len() as i64) as usize
        };
        self.coeffs.truncate(keep);
        while self.coeffs.last().is_some_and(LPoly::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.val = 0;
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.val += lead as i64;
        }
    }

    /// `O(t^prec)`.
    pub fn zero_to(prec: i64) -> Self {
        TSeries { val: 0, coeffs: Vec::new(), prec }
    }

    pub fn zero() -> Self {
        Self::zero_to(EXACT)
    }

    pub fn one() -> Self {
        Self::from_lpoly(LPoly::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::from_lpoly(LPoly::constant(c))
    }

    pub fn from_lpoly(p: LPoly) -> Self {
        Self::new(0, vec![p], EXACT)
    }

    /// Exact monomial `c t^t_exp x^x_exp`.
    pub fn monomial(c: Rat, t_exp: i64, x_exp: i64) -> Self {
        Self::new(t_exp, vec![LPoly::monomial(c, x_exp)], EXACT)
    }

    /// Exact polynomial from `(t_exp, x_exp, c)` triples.
    pub fn poly(terms: &[(i64, i64, Rat)]) -> Self {
        terms.iter().fold(Self::zero(), |acc, (te, xe, c)| {
            &acc + &Self::monomial(c.clone(), *te, *xe)
        })
    }

    /// Exact univariate polynomial in `t` from rational coefficients of `t^0, t^1, ...`.
    pub fn from_rats(coeffs: &[Rat]) -> Self {
        Self::new(0, coeffs.iter().cloned().map(LPoly::constant).collect(), EXACT)
    }

    /// Series in `t` only, from coefficients of `t^val, t^(val+1), ...`, known to `prec`.
    pub fn from_rat_coeffs(val: i64, coeffs: Vec<Rat>, prec: i64) -> Self {
        Self::new(val, coeffs.into_iter().map(LPoly::constant).collect(), prec)
    }

    pub fn t() -> Self {
        Self::monomial(Rat::one(), 1, 0)
    }

    pub fn x() -> Self {
        Self::monomial(Rat::one(), 0, 1)
    }

    pub fn xbar() -> Self {
        Self::monomial(Rat::one(), 0, -1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT
    }

    /// Absolute precision: coefficients of `t^n` are known for `n < prec()`.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Lowest `t`-exponent with a nonzero coefficient; `0` for the zero series.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    /// Number of reliable coefficients from the valuation on.
    pub fn order(&self) -> i64 {
        if self.is_exact() {
            EXACT
        } else {
            self.prec - self.eff_val()
        }
    }

    /// Valuation used for precision bookkeeping: a zero series is `O(t^prec)`.
    fn eff_val(&self) -> i64 {
        if self.is_zero() {
            self.prec
        } else {
            self.val
        }
    }

    /// Coefficient of `t^n`. Panics when `n` is outside the reliable window.
    pub fn coeff(&self, n: i64) -> LPoly {
        assert!(n < self.prec, "coefficient t^{n} requested beyond precision {}", self.prec);
        if n < self.val || n >= self.val + self.coeffs.len() as i64 {
            LPoly::zero()
        } else {
            self.coeffs[(n - self.val) as usize].clone()
        }
    }

    /// Coefficient of `t^n x^e`.
    pub fn coeff_xt(&self, n: i64, e: i64) -> Rat {
        self.coeff(n).coeff(e)
    }

    /// `(n, [t^n])` for every stored nonzero coefficient.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &LPoly)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.val + k as i64, c))
    }

    /// Forgets everything at and above `t^prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        Self::new(self.val, self.coeffs.clone(), self.prec.min(prec))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero_to(self.prec);
        }
        Self::new(self.val, self.coeffs.iter().map(|p| p.scale(c)).collect(), self.prec)
    }

    /// Multiplies by `t^k`.
    pub fn shift_t(&self, k: i64) -> Self {
        Self::new(self.val + k, self.coeffs.clone(), prec_add(self.prec, k))
    }

    /// Multiplies by `x^k`.
    pub fn shift_x(&self, k: i64) -> Self {
        Self::new(self.val, self.coeffs.iter().map(|p| p.shift(k)).collect(), self.prec)
    }

    pub fn map_coeffs(&self, f: impl Fn(&LPoly) -> LPoly) -> Self {
        Self::new(self.val, self.coeffs.iter().map(f).collect(), self.prec)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Multiplicative inverse. The leading coefficient must be a nonzero
    /// constant in `x`; the valuation of the result is minus that of `self`.
    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero series".into()));
        }
        let c0 = self.coeffs[0]
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or_else(|| Error::NotInvertible(format!("{}", self.coeffs[0])))?;
        let inv0 = c0.recip();
        if self.is_exact() {
            if self.coeffs.len() == 1 {
                return Ok(Self::monomial(inv0, -self.val, 0));
            }
            return Err(Error::UnboundedPrecision);
        }
        let m = (self.prec - self.val) as usize;
        let mut b: Vec<LPoly> = Vec::with_capacity(m);
        b.push(LPoly::constant(inv0.clone()));
        for k in 1..m {
            let mut acc = LPoly::zero();
            for i in 1..=k.min(self.coeffs.len() - 1) {
                acc.add_assign_product(&self.coeffs[i], &b[k - i]);
            }
            b.push(acc.scale(&-inv0.clone()));
        }
        Ok(Self::new(-self.val, b, -self.val + m as i64))
    }

    /// Square root by Newton iteration `b <- (b + a/b)/2`, on the branch whose
    /// leading coefficient is the positive rational square root.
    pub fn sqrt(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero_to(self.prec.div_euclid(2)));
        }
        if self.val % 2 != 0 {
            return Err(Error::NoSquareRoot(format!("odd valuation {}", self.val)));
        }
        let c0 = self.coeffs[0]
            .as_constant()
            .ok_or_else(|| Error::NoSquareRoot(format!("leading coefficient {}", self.coeffs[0])))?;
        let s0 = rat_sqrt(&c0)
            .filter(|s| s.is_positive())
            .ok_or_else(|| Error::NoSquareRoot(format!("leading coefficient {c0}")))?;
        let half = self.val / 2;
        if self.is_exact() {
            if self.coeffs.len() == 1 {
                return Ok(Self::monomial(s0, half, 0));
            }
            return Err(Error::UnboundedPrecision);
        }
        let m = self.prec - self.val;
        let u = self.shift_t(-self.val);
        let two_inv = rat(1, 2);
        let mut b = Self::constant(s0).truncate(1);
        let mut cur = 1;
        while cur < m {
            cur = (2 * cur).min(m);
            let bt = Self::new(0, b.coeffs.clone(), cur);
            let q = &u.truncate(cur) * &bt.invert()?;
            b = (&bt + &q).scale(&two_inv);
        }
        // The doubling schedule is exact in exact arithmetic; confirm anyway.
        let sq = &b * &b;
        if let Some((n, _)) = sq.first_difference(&u, m) {
            return Err(Error::NoSquareRoot(format!("Newton iteration did not settle at t^{n}")));
        }
        Ok(b.shift_t(half))
    }

    /// Per-coefficient selection of `x`-exponents by sign.
    pub fn x_part(&self, mode: XPart) -> Self {
        self.map_coeffs(|p| p.filter(|e| mode.keeps(e)))
    }

    /// Coefficient of `x^e` as a series in `t` alone.
    pub fn x_coeff(&self, e: i64) -> Self {
        self.map_coeffs(|p| LPoly::constant(p.coeff(e)))
    }

    /// Substitutes `x := c t^k`, returning a Laurent series in `t` alone.
    ///
    /// The unknown tail is assumed to have `x`-exponents no smaller than the
    /// smallest one stored (true for every polynomial-in-`x` series here);
    /// for `k < 0` the input must be exact.
    pub fn substitute_monomial(&self, c: &Rat, k: i64) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::InvalidParams("substitution by zero".into()));
        }
        let mut out: Vec<(i64, Rat)> = Vec::new();
        let mut e_lo = i64::MAX;
        for (n, p) in self.iter() {
            for (e, v) in p.terms() {
                e_lo = e_lo.min(e);
                out.push((n + k * e, v * rat_pow(c, e)));
            }
        }
        let prec = if self.is_exact() {
            EXACT
        } else if k == 0 {
            self.prec
        } else if k > 0 {
            let lo = if e_lo == i64::MAX { 0 } else { e_lo };
            self.prec + k * lo
        } else {
            return Err(Error::WindowExhausted(format!(
                "x := c t^{k} maps the unknown tail below every retained coefficient; \
                 supply the input exactly"
            )));
        };
        let lo = out.iter().map(|(n, _)| *n).min().unwrap_or(0).min(prec);
        let hi = out.iter().map(|(n, _)| *n).max().unwrap_or(0);
        let mut coeffs = vec![LPoly::zero(); (hi - lo + 1).max(0) as usize];
        for (n, v) in out {
            coeffs[(n - lo) as usize].add_term(0, v);
        }
        Ok(Self::new(lo, coeffs, prec))
    }

    /// Substitutes `x := s` for a series `s` in `t` (its coefficients may
    /// themselves depend on `x`). Negative `x`-exponents need `s` invertible.
    pub fn compose_x(&self, s: &TSeries) -> Result<Self> {
        let (e_lo, e_hi) = self.x_range().unwrap_or((0, 0));
        let sv = s.eff_val();
        let mut pos = vec![Self::one()];
        for _ in 0..e_hi.max(0) {
            let next = pos.last().unwrap() * s;
            pos.push(next);
        }
        let mut neg = vec![Self::one()];
        if e_lo < 0 {
            let inv = s.invert()?;
            for _ in 0..(-e_lo) {
                let next = neg.last().unwrap() * &inv;
                neg.push(next);
            }
        }
        let tail = if self.is_exact() {
            EXACT
        } else {
            // Unknown terms t^n x^e with n >= prec and e >= e_lo.
            prec_add(self.prec, e_lo.min(0) * sv.max(0) + e_lo.max(0) * sv.min(0))
        };
        let mut acc = Self::zero_to(tail);
        for (n, p) in self.iter() {
            for (e, v) in p.terms() {
                let base = if e >= 0 { &pos[e as usize] } else { &neg[(-e) as usize] };
                acc = &acc + &base.shift_t(n).scale(v);
            }
        }
        Ok(acc)
    }

    /// Smallest and largest `x`-exponent stored.
    pub fn x_range(&self) -> Option<(i64, i64)> {
        let lo = self.coeffs.iter().filter_map(LPoly::min_exp).min()?;
        let hi = self.coeffs.iter().filter_map(LPoly::max_exp).max()?;
        Some((lo, hi))
    }

    /// First `t`-exponent below `upto` (and below both precisions) where the
    /// two series differ, with the difference there.
    pub fn first_difference(&self, other: &TSeries, upto: i64) -> Option<(i64, LPoly)> {
        let hi = upto.min(self.prec).min(other.prec);
        let lo = self.val.min(other.val);
        (lo..hi).find_map(|n| {
            let d = &self.coeff(n) - &other.coeff(n);
            (!d.is_zero()).then_some((n, d))
        })
    }

    /// Checks agreement on the common reliable window up to `upto`; the
    /// window must actually reach `upto`.
    pub fn check_eq(&self, other: &TSeries, upto: i64, what: &str) -> Result<()> {
        let reach = self.prec.min(other.prec);
        if reach < upto {
            return Err(Error::WindowExhausted(format!(
                "{what}: reliable only below t^{reach}, need t^{upto}"
            )));
        }
        match self.first_difference(other, upto) {
            None => Ok(()),
            Some((n, d)) => Err(Error::IdentityFailed(format!("{what}: differs at t^{n} by {d}"))),
        }
    }

    /// True when every `x`-exponent in the series is nonnegative.
    pub fn is_polynomial_in_x(&self) -> bool {
        self.x_range().is_none_or(|(lo, _)| lo >= 0)
    }
}

impl Add for &TSeries {
    type Output = TSeries;
    fn add(self, rhs: &TSeries) -> TSeries {
        let prec = self.prec.min(rhs.prec);
        if self.is_zero() {
            return rhs.truncate(prec);
        }
        if rhs.is_zero() {
            return self.truncate(prec);
        }
        let lo = self.val.min(rhs.val);
        let hi = (self.val + self.coeffs.len() as i64).max(rhs.val + rhs.coeffs.len() as i64);
        let hi = hi.min(prec).max(lo);
        let mut coeffs = vec![LPoly::zero(); (hi - lo) as usize];
        for src in [self, rhs] {
            for (k, c) in src.coeffs.iter().enumerate() {
                let n = src.val + k as i64;
                if n >= hi {
                    break;
                }
                let slot = &mut coeffs[(n - lo) as usize];
                slot.add_assign_scaled(c, &Rat::one());
            }
        }
        TSeries::new(lo, coeffs, prec)
    }
}

impl Neg for &TSeries {
    type Output = TSeries;
    fn neg(self) -> TSeries {
        self.map_coeffs(|p| -p)
    }
}

impl Sub for &TSeries {
    type Output = TSeries;
    fn sub(self, rhs: &TSeries) -> TSeries {
        self + &(-rhs)
    }
}

impl Mul for &TSeries {
    type Output = TSeries;
    fn mul(self, rhs: &TSeries) -> TSeries {
        let prec = prec_add(self.eff_val(), rhs.prec).min(prec_add(rhs.eff_val(), self.prec));
        if self.is_zero() || rhs.is_zero() {
            return TSeries::zero_to(prec);
        }
        let base = self.val + rhs.val;
        let len = if prec >= EXACT {
            self.coeffs.len() + rhs.coeffs.len() - 1
        } else {
            (prec - base).clamp(0, (self.coeffs.len() + rhs.coeffs.len()) as i64) as usize
        };
        let mut coeffs = vec![LPoly::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j].add_assign_product(a, b);
            }
        }
        TSeries::new(base, coeffs, prec)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for TSeries {
            type Output = TSeries;
            fn $m(self, rhs: TSeries) -> TSeries {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&TSeries> for TSeries {
            type Output = TSeries;
            fn $m(self, rhs: &TSeries) -> TSeries {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for TSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(n, p)| format!("({p})*t^{n}")).collect();
        let body = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
        if self.is_exact() {
            write!(f, "{body}")
        } else {
            write!(f, "{body} + O(t^{})", self.prec)
        }
    }
}

/// Iterates `u <- update(u)` from `u = 0` until the iterate is stationary to
/// order `order`. Each round must fix at least one more coefficient.
pub fn solve_valuation_fixed_point(
    update: impl Fn(&TSeries) -> TSeries,
    order: i64,
) -> Result<TSeries> {
    let mut u = TSeries::zero_to(order);
    let mut agreed = i64::MIN;
    for _ in 0..(order.max(1) + 4) {
        let next = update(&u).truncate(order);
        if next.prec() < order {
            return Err(Error::WindowExhausted(format!(
                "update loses precision: t^{} < t^{order}",
                next.prec()
            )));
        }
        match next.first_difference(&u, order) {
            None => return Ok(next),
            Some((n, _)) => {
                if n <= agreed {
                    return Err(Error::NonContracting(format!(
                        "first disagreement stuck at t^{n}"
                    )));
                }
                agreed = n;
            }
        }
        u = next;
    }
    Err(Error::NonContracting(format!("no fixed point after {} rounds", order + 4)))
}

/// `1 / (1 - t^k)` to precision `prec`.
pub fn geometric(k: i64, prec: i64) -> TSeries {
    let coeffs = (0..prec.max(0))
        .map(|n| if n % k == 0 { LPoly::one() } else { LPoly::zero() })
        .collect();
    TSeries::new(0, coeffs, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat::rat_int;

    fn ts(c: &[i64]) -> TSeries {
        TSeries::from_rats(&c.iter().map(|&v| rat_int(v)).collect::<Vec<_>>())
    }

    #[test]
    fn add_examples() {
        let one_plus_t = ts(&[1, 1]);
        assert_eq!(&one_plus_t + &TSeries::t(), ts(&[1, 2]));
        assert_eq!(&one_plus_t + &TSeries::zero(), one_plus_t);
        let xbt = TSeries::monomial(rat_int(1), 1, -1);
        assert!((&xbt + &(-&xbt)).is_zero());
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&ts(&[1, 1]) * &ts(&[1, -1]), ts(&[1, 0, -1]));
        let f = ts(&[3, 0, 5]).truncate(10);
        assert_eq!(&f * &TSeries::one(), f);
        let a = &TSeries::x() + &TSeries::xbar();
        let b = &TSeries::x() - &TSeries::xbar();
        let expect = &TSeries::monomial(rat_int(1), 0, 2) - &TSeries::monomial(rat_int(1), 0, -2);
        assert_eq!(&a * &b, expect);
    }

    #[test]
    fn mul_precision_follows_valuations() {
        // t^-1 * (1 + O(t^5)) is only known below t^4.
        let a = TSeries::monomial(rat_int(1), -1, 0).truncate(3);
        let b = ts(&[1]).truncate(5);
        assert_eq!((&a * &b).prec(), 3);
        let c = TSeries::monomial(rat_int(1), -1, 0);
        assert_eq!((&c * &b).prec(), 4);
    }

    #[test]
    fn invert_examples() {
        let g = ts(&[1, -1]).truncate(8).invert().unwrap();
        assert_eq!(g, ts(&[1; 8]).truncate(8));
        assert_eq!(TSeries::one().invert().unwrap(), TSeries::one());
        let two_t = TSeries::monomial(rat_int(2), 1, 0);
        assert_eq!(two_t.invert().unwrap(), TSeries::monomial(rat(1, 2), -1, 0));
        assert_eq!(two_t.truncate(6).invert().unwrap().valuation(), -1);
    }

    #[test]
    fn invert_rejects_x_dependent_lead() {
        let a = (&TSeries::x() + &TSeries::t()).truncate(5);
        assert!(matches!(a.invert(), Err(Error::NotInvertible(_))));
        assert!(matches!(TSeries::zero_to(4).invert(), Err(Error::NotInvertible(_))));
        assert!(matches!(ts(&[1, 1]).invert(), Err(Error::UnboundedPrecision)));
    }

    #[test]
    fn sqrt_catalan() {
        // sqrt(1 - 4t) = 1 - 2 sum C_n t^{n+1}
        let s = ts(&[1, -4]).truncate(8).sqrt().unwrap();
        assert_eq!(s, ts(&[1, -2, -2, -4, -10, -28, -84, -264]).truncate(8));
    }

    #[test]
    fn sqrt_exact_inputs() {
        assert_eq!(TSeries::one().sqrt().unwrap(), TSeries::one());
        let sq = (&ts(&[1, -1]) * &ts(&[1, -1])).truncate(12);
        assert_eq!(sq.sqrt().unwrap(), ts(&[1, -1]).truncate(12));
        let four_t2 = TSeries::monomial(rat_int(4), 2, 0).truncate(9);
        assert_eq!(four_t2.sqrt().unwrap(), TSeries::monomial(rat_int(2), 1, 0).truncate(8));
    }

    #[test]
    fn sqrt_rejections() {
        assert!(ts(&[2, 1]).truncate(5).sqrt().is_err());
        assert!(TSeries::t().truncate(5).sqrt().is_err());
        assert!(ts(&[-1, 1]).truncate(5).sqrt().is_err());
    }

    #[test]
    fn x_part_examples() {
        let a = TSeries::poly(&[(1, -1, rat_int(1)), (1, 0, rat_int(1)), (1, 1, rat_int(1))]);
        assert_eq!(a.x_part(XPart::Positive), TSeries::monomial(rat_int(1), 1, 1));
        assert_eq!(
            a.x_part(XPart::NonPositive),
            TSeries::poly(&[(1, -1, rat_int(1)), (1, 0, rat_int(1))])
        );
        assert!(TSeries::constant(rat_int(5)).x_part(XPart::Positive).is_zero());
    }

    #[test]
    fn substitute_examples() {
        // x := t in x + xbar t^2 -> 2t
        let a = TSeries::poly(&[(0, 1, rat_int(1)), (2, -1, rat_int(1))]);
        assert_eq!(a.substitute_monomial(&rat_int(1), 1).unwrap(), TSeries::monomial(rat_int(2), 1, 0));
        let x2 = TSeries::monomial(rat_int(1), 0, 2);
        assert_eq!(x2.substitute_monomial(&rat(1, 2), 0).unwrap(), TSeries::constant(rat(1, 4)));
    }

    #[test]
    fn substitute_exhausted_window() {
        let a = TSeries::poly(&[(0, 2, rat_int(1))]).truncate(4);
        assert!(matches!(a.substitute_monomial(&rat_int(1), -1), Err(Error::WindowExhausted(_))));
    }

    #[test]
    fn fixed_point_examples() {
        let t = TSeries::t();
        let u = solve_valuation_fixed_point(|u| &t * &(&TSeries::one() + u), 10).unwrap();
        assert_eq!(u, ts(&[0, 1, 1, 1, 1, 1, 1, 1, 1, 1]).truncate(10));
        let bad = solve_valuation_fixed_point(|u| &TSeries::one() + u, 6);
        assert!(matches!(bad, Err(Error::NonContracting(_))));
    }

    #[test]
    fn compose_in_t() {
        // (1 + x)^2 at x := t/(1-t) ... check x^2 + x at x := 2t
        let a = TSeries::poly(&[(0, 1, rat_int(1)), (0, 2, rat_int(1))]);
        let s = TSeries::monomial(rat_int(2), 1, 0);
        assert_eq!(a.compose_x(&s).unwrap(), ts(&[0, 2, 4]));
    }
}
