//! Truncated power series in `t` with bivariate Laurent-polynomial coefficients in `x`, `y`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num::Zero;

use super::lpoly::LPoly;
use super::rat::{rat_pow, Rat};
use super::tseries::TSeries;

pub type BiPoly = BTreeMap<(i64, i64), Rat>;

fn bi_add_term(p: &mut BiPoly, key: (i64, i64), c: Rat) {
    if c.is_zero() {
        return;
    }
    let slot = p.entry(key).or_insert_with(Rat::zero);
    *slot += c;
    if slot.is_zero() {
        p.remove(&key);
    }
}

/// `sum_n t^n P_n(x, y)` known for `n < order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BSeries {
    layers: Vec<BiPoly>,
}

impl BSeries {
    pub fn zero(order: usize) -> Self {
        BSeries { layers: vec![BiPoly::new(); order] }
    }

    /// Polynomial from `(t_exp, x_exp, y_exp, c)` terms, truncated to `order`.
    pub fn from_terms(order: usize, terms: &[(usize, i64, i64, Rat)]) -> Self {
        let mut s = Self::zero(order);
        for (n, i, j, c) in terms {
            s.add_term(*n, *i, *j, c.clone());
        }
        s
    }

    /// Embeds a power series in `t` with coefficients in `x` (no `y`).
    pub fn from_x_series(f: &TSeries, order: usize) -> Self {
        assert!(f.prec() >= order as i64, "source series known only below t^{}", f.prec());
        let mut s = Self::zero(order);
        for (n, p) in f.iter() {
            assert!(n >= 0, "negative t-exponent in a bivariate power series");
            for (e, c) in p.terms() {
                s.add_term(n as usize, e, 0, c.clone());
            }
        }
        s
    }

    pub fn from_y_series(f: &TSeries, order: usize) -> Self {
        Self::from_x_series(f, order).swap_xy()
    }

    pub fn order(&self) -> usize {
        self.layers.len()
    }

    pub fn add_term(&mut self, n: usize, i: i64, j: i64, c: Rat) {
        if n < self.layers.len() {
            bi_add_term(&mut self.layers[n], (i, j), c);
        }
    }

    pub fn coeff(&self, n: usize, i: i64, j: i64) -> Rat {
        assert!(n < self.layers.len(), "t^{n} beyond order {}", self.layers.len());
        self.layers[n].get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn layer(&self, n: usize) -> &BiPoly {
        &self.layers[n]
    }

    pub fn truncate(&self, order: usize) -> Self {
        BSeries { layers: self.layers.iter().take(order).cloned().collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(BTreeMap::is_empty)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        self.map_terms(|i, j, v| Some((i, j, v * c)))
    }

    fn map_terms(&self, f: impl Fn(i64, i64, &Rat) -> Option<(i64, i64, Rat)>) -> Self {
        let mut out = Self::zero(self.order());
        for (n, layer) in self.layers.iter().enumerate() {
            for (&(i, j), v) in layer {
                if let Some((a, b, c)) = f(i, j, v) {
                    out.add_term(n, a, b, c);
                }
            }
        }
        out
    }

    /// `F(y, x)`.
    pub fn swap_xy(&self) -> Self {
        self.map_terms(|i, j, v| Some((j, i, v.clone())))
    }

    /// `F(a x, b y)`.
    pub fn scale_vars(&self, a: &Rat, b: &Rat) -> Self {
        self.map_terms(|i, j, v| Some((i, j, v * rat_pow(a, i) * rat_pow(b, j))))
    }

    /// `F(x, 0)` as a series in `t` with coefficients in `x`; assumes no negative `y`-powers.
    pub fn at_y_zero(&self) -> TSeries {
        let coeffs = self
            .layers
            .iter()
            .map(|l| {
                LPoly::from_terms(l.iter().filter(|((_, j), _)| *j == 0).map(|((i, _), v)| (*i, v.clone())))
            })
            .collect();
        TSeries::new(0, coeffs, self.order() as i64)
    }

    /// `F(0, y)` written in the variable `x` of the returned series.
    pub fn at_x_zero(&self) -> TSeries {
        self.swap_xy().at_y_zero()
    }

    /// `F(1, 1)` as a series in `t`.
    pub fn at_ones(&self) -> TSeries {
        let coeffs = self
            .layers
            .iter()
            .map(|l| LPoly::constant(l.values().fold(Rat::zero(), |a, v| a + v)))
            .collect();
        TSeries::new(0, coeffs, self.order() as i64)
    }

    /// Diagonal `sum_{i,n} [x^i y^i t^n] F  x^i t^n`.
    pub fn diagonal(&self) -> TSeries {
        let coeffs = self
            .layers
            .iter()
            .map(|l| LPoly::from_terms(l.iter().filter(|((i, j), _)| i == j).map(|((i, _), v)| (*i, v.clone()))))
            .collect();
        TSeries::new(0, coeffs, self.order() as i64)
    }

    /// First `(n, i, j, difference)` where the two series disagree below `upto`.
    pub fn first_difference(&self, other: &BSeries, upto: usize) -> Option<(usize, i64, i64, Rat)> {
        let hi = upto.min(self.order()).min(other.order());
        for n in 0..hi {
            let d = &self.layers[n];
            let e = &other.layers[n];
            let keys: std::collections::BTreeSet<_> = d.keys().chain(e.keys()).collect();
            for k in keys {
                let a = d.get(k).cloned().unwrap_or_else(Rat::zero);
                let b = e.get(k).cloned().unwrap_or_else(Rat::zero);
                if a != b {
                    return Some((n, k.0, k.1, a - b));
                }
            }
        }
        None
    }

    /// Smallest `x`- and `y`-exponents present.
    pub fn min_exponents(&self) -> (i64, i64) {
        let mut lo = (0, 0);
        for l in &self.layers {
            for &(i, j) in l.keys() {
                lo.0 = lo.0.min(i);
                lo.1 = lo.1.min(j);
            }
        }
        lo
    }
}

impl Add for &BSeries {
    type Output = BSeries;
    fn add(self, rhs: &BSeries) -> BSeries {
        let order = self.order().min(rhs.order());
        let mut out = self.truncate(order);
        for (n, layer) in rhs.layers.iter().take(order).enumerate() {
            for (k, v) in layer {
                bi_add_term(&mut out.layers[n], *k, v.clone());
            }
        }
        out
    }
}

impl Neg for &BSeries {
    type Output = BSeries;
    fn neg(self) -> BSeries {
        self.map_terms(|i, j, v| Some((i, j, -v.clone())))
    }
}

impl Sub for &BSeries {
    type Output = BSeries;
    fn sub(self, rhs: &BSeries) -> BSeries {
        self + &(-rhs)
    }
}

impl Mul for &BSeries {
    type Output = BSeries;
    fn mul(self, rhs: &BSeries) -> BSeries {
        let order = self.order().min(rhs.order());
        let mut out = BSeries::zero(order);
        for (a, la) in self.layers.iter().enumerate().take(order) {
            if la.is_empty() {
                continue;
            }
            for (b, lb) in rhs.layers.iter().enumerate().take(order - a) {
                let dst = &mut out.layers[a + b];
                for (&(i, j), u) in la {
                    for (&(k, l), v) in lb {
                        bi_add_term(dst, (i + k, j + l), u * v);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat::rat_int;

    #[test]
    fn diagonal_examples() {
        let xy_t = BSeries::from_terms(4, &[(1, 1, 1, rat_int(1))]);
        assert_eq!(xy_t.diagonal(), TSeries::monomial(rat_int(1), 1, 1).truncate(4));
        let x2y_t = BSeries::from_terms(4, &[(1, 2, 1, rat_int(1))]);
        assert!(x2y_t.diagonal().is_zero());
    }

    #[test]
    fn product_and_swap() {
        let a = BSeries::from_terms(5, &[(0, 1, 0, rat_int(1)), (1, 0, 1, rat_int(2))]);
        let b = BSeries::from_terms(5, &[(0, 0, 0, rat_int(1)), (2, 1, 1, rat_int(-1))]);
        let prod = &a * &b;
        assert_eq!(prod.coeff(0, 1, 0), rat_int(1));
        assert_eq!(prod.coeff(2, 2, 1), rat_int(-1));
        assert_eq!(prod.coeff(3, 1, 2), rat_int(-2));
        assert_eq!(prod.swap_xy().coeff(3, 2, 1), rat_int(-2));
        assert_eq!(prod.swap_xy().swap_xy(), prod);
    }
}
