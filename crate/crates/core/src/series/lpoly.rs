//! Laurent polynomials in one formal variable `x` over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Zero};

use super::rat::{fmt_rat, rat_pow, Rat};

/// Sparse Laurent polynomial `sum_i c_i x^i`; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LPoly {
    terms: BTreeMap<i64, Rat>,
}

impl LPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Rat, exp: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rat)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// Adds `c x^exp`, dropping the entry if it cancels.
    pub fn add_term(&mut self, exp: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> Rat {
        self.terms.get(&exp).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&0).cloned(),
            _ => None,
        }
    }

    /// `Some((c, e))` when the polynomial is the single monomial `c x^e`.
    pub fn as_monomial(&self) -> Option<(Rat, i64)> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some((c.clone(), *e))
        } else {
            None
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, v)| (e + k, v.clone())).collect(),
        }
    }

    /// Keeps the terms whose exponent satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(i64) -> bool) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(**e))
                .map(|(e, v)| (*e, v.clone()))
                .collect(),
        }
    }

    /// Substitutes `x := c` for a nonzero rational `c`.
    pub fn eval(&self, c: &Rat) -> Rat {
        self.terms
            .iter()
            .fold(Rat::zero(), |acc, (e, v)| acc + v * rat_pow(c, *e))
    }

    /// Substitutes `x := c x^k`, e.g. `x -> xbar / rho` with `k = -1`.
    pub fn substitute_scaled(&self, c: &Rat, k: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, v)| (e * k, v * rat_pow(c, *e))))
    }

    pub fn add_assign_scaled(&mut self, other: &LPoly, c: &Rat) {
        for (e, v) in &other.terms {
            self.add_term(*e, v * c);
        }
    }

    pub fn add_assign_product(&mut self, a: &LPoly, b: &LPoly) {
        for (ea, va) in &a.terms {
            for (eb, vb) in &b.terms {
                self.add_term(ea + eb, va * vb);
            }
        }
    }
}

impl Add for &LPoly {
    type Output = LPoly;
    fn add(self, rhs: &LPoly) -> LPoly {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(*e, v.clone());
        }
        out
    }
}

impl Sub for &LPoly {
    type Output = LPoly;
    fn sub(self, rhs: &LPoly) -> LPoly {
        let mut out = self.clone();
        for (e, v) in &rhs.terms {
            out.add_term(*e, -v.clone());
        }
        out
    }
}

impl Neg for &LPoly {
    type Output = LPoly;
    fn neg(self) -> LPoly {
        LPoly {
            terms: self.terms.iter().map(|(e, v)| (*e, -v.clone())).collect(),
        }
    }
}

impl Mul for &LPoly {
    type Output = LPoly;
    fn mul(self, rhs: &LPoly) -> LPoly {
        let mut out = LPoly::zero();
        out.add_assign_product(self, rhs);
        out
    }
}

impl fmt::Display for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| match e {
                0 => fmt_rat(c),
                _ => format!("{}*x^{}", fmt_rat(c), e),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat::{rat, rat_int};

    fn p(terms: &[(i64, i64)]) -> LPoly {
        LPoly::from_terms(terms.iter().map(|&(e, c)| (e, rat_int(c))))
    }

    #[test]
    fn laurent_product() {
        // (x + xbar)(x - xbar) = x^2 - xbar^2
        let a = p(&[(1, 1), (-1, 1)]);
        let b = p(&[(1, 1), (-1, -1)]);
        assert_eq!(&a * &b, p(&[(2, 1), (-2, -1)]));
    }

    #[test]
    fn cancellation_drops_terms() {
        let a = p(&[(3, 2)]);
        assert!((&a - &a).is_zero());
        assert_eq!((&a - &a).as_constant(), Some(rat_int(0)));
    }

    #[test]
    fn substitution() {
        let a = p(&[(2, 1), (-1, 3)]);
        assert_eq!(a.eval(&rat(1, 2)), rat(1, 4) + rat_int(6));
        // x -> 2 xbar
        let s = a.substitute_scaled(&rat_int(2), -1);
        assert_eq!(s, LPoly::from_terms([(-2, rat_int(4)), (1, rat(3, 2))]));
    }
}
