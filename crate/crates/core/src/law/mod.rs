//! Time-dependent law of the reflected Kreweras chain started at the origin.
//!
//! `p_{i,j}(n)` is computed exactly by a forward recurrence; the generating
//! function `Q(x,y) = P00 + r' P1(x) + r'' P2(y) + r P(x,y)` is split into the
//! symmetric and antisymmetric combinations
//! `S, D = (t-qx)(t-py) Q(px,qy) +/- (t-px)(t-qy) Q(py,qx)`,
//! whose sections `S(x,0)` and `D(x,0)` have closed forms in [`closed`].

pub mod closed;
mod verify;

use std::collections::BTreeMap;

use num::{One, Zero};

use crate::series::{BSeries, Rat, TSeries};
pub use crate::stationary::ChainParams;

pub use closed::{
    b_decomposition, b_series, boundary_values_t, cplus_lagrange, d_x0_closed, p00_closed_general,
    p00_symmetric, qpx0_symmetric, s_x0_closed, BcDecomposition, BoundaryValues, CminusConvention,
};
pub use verify::{ergodicity_observe, verify_law, ErgodicityTrace, DEFAULT_LAW_ORDER};

/// Exact `p_{i,j}(n)` for `n <= n_max`, nonzero entries only.
#[derive(Clone, Debug)]
pub struct LawTable {
    pub n_max: usize,
    layers: Vec<BTreeMap<(usize, usize), Rat>>,
}

/// Successors of `(i, j)` with their probabilities.
fn moves(params: &ChainParams, i: usize, j: usize) -> Vec<((usize, usize), Rat)> {
    match (i > 0, j > 0) {
        (false, false) => vec![((1, 1), Rat::one())],
        (true, false) => vec![((i - 1, 0), params.p_prime()), ((i + 1, 1), params.r_prime())],
        (false, true) => vec![((0, j - 1), params.q_second()), ((1, j + 1), params.r_second())],
        (true, true) => vec![
            ((i - 1, j), params.p.clone()),
            ((i, j - 1), params.q.clone()),
            ((i + 1, j + 1), params.r.clone()),
        ],
    }
}

/// Forward recurrence from the point mass at the origin.
pub fn law_dp(params: &ChainParams, n_max: usize) -> LawTable {
    let mut layers = Vec::with_capacity(n_max + 1);
    let mut cur = BTreeMap::new();
    cur.insert((0, 0), Rat::one());
    layers.push(cur);
    for n in 0..n_max {
        let mut next: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
        for (&(i, j), m) in &layers[n] {
            for (dst, pr) in moves(params, i, j) {
                *next.entry(dst).or_insert_with(Rat::zero) += m * pr;
            }
        }
        next.retain(|_, v| !v.is_zero());
        layers.push(next);
    }
    LawTable { n_max, layers }
}

impl LawTable {
    pub fn get(&self, n: usize, i: usize, j: usize) -> Rat {
        self.layers[n].get(&(i, j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn layer(&self, n: usize) -> &BTreeMap<(usize, usize), Rat> {
        &self.layers[n]
    }

    pub fn row_sum(&self, n: usize) -> Rat {
        self.layers[n].values().fold(Rat::zero(), |a, v| a + v)
    }

    /// `P00 = sum_n p_{0,0}(n) t^n`, known below `t^(n_max + 1)`.
    pub fn p00_series(&self) -> TSeries {
        let coeffs = (0..=self.n_max).map(|n| self.get(n, 0, 0)).collect();
        TSeries::from_rat_coeffs(0, coeffs, self.n_max as i64 + 1)
    }

    /// `Q(x,y)` with the boundary weights `1, r', r'', r`.
    pub fn q_series(&self, params: &ChainParams) -> BSeries {
        let (rp, rs) = (params.r_prime(), params.r_second());
        let mut q = BSeries::zero(self.n_max + 1);
        for (n, layer) in self.layers.iter().enumerate() {
            for (&(i, j), v) in layer {
                let w = match (i, j) {
                    (0, 0) => Rat::one(),
                    (_, 0) => rp.clone(),
                    (0, _) => rs.clone(),
                    _ => params.r.clone(),
                };
                q.add_term(n, i as i64, j as i64, v * w);
            }
        }
        q
    }

    /// CSV rows `n,i,j,probability` for the nonzero entries with `n` in range.
    pub fn to_csv(&self, n_lo: usize, n_hi: usize) -> String {
        let mut out = String::from("n,i,j,probability\n");
        for n in n_lo..=n_hi.min(self.n_max) {
            for (&(i, j), v) in &self.layers[n] {
                out.push_str(&format!("{n},{i},{j},{}\n", crate::series::fmt_rat(v)));
            }
        }
        out
    }
}

/// `p_{0,0}(n)` for `n <= n_max` in floating point, for long runs.
pub fn p00_trajectory_f64(params: &ChainParams, n_max: usize) -> Vec<f64> {
    let f = |r: &Rat| crate::series::rat::rat_to_f64(r);
    let (p, q, r) = (f(&params.p), f(&params.q), f(&params.r));
    let (pp, rp, qs, rs) = (f(&params.p_prime()), f(&params.r_prime()), f(&params.q_second()), f(&params.r_second()));
    let g = n_max + 2;
    let mut cur = vec![0.0f64; g * g];
    let mut next = vec![0.0f64; g * g];
    cur[0] = 1.0;
    let mut out = vec![1.0];
    for _ in 0..n_max {
        next.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..g - 1 {
            for j in 0..g - 1 {
                let m = cur[i * g + j];
                if m == 0.0 {
                    continue;
                }
                match (i > 0, j > 0) {
                    (false, false) => next[g + 1] += m,
                    (true, false) => {
                        next[(i - 1) * g] += pp * m;
                        next[(i + 1) * g + 1] += rp * m;
                    }
                    (false, true) => {
                        next[j - 1] += qs * m;
                        next[g + j + 1] += rs * m;
                    }
                    (true, true) => {
                        next[(i - 1) * g + j] += p * m;
                        next[i * g + j - 1] += q * m;
                        next[(i + 1) * g + j + 1] += r * m;
                    }
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
        out.push(cur[0]);
    }
    out
}

/// `S`, `D` and their sections assembled from the exact law.
#[derive(Clone, Debug)]
pub struct SdPair {
    pub q: BSeries,
    pub s: BSeries,
    pub d: BSeries,
    pub sx0: TSeries,
    pub dx0: TSeries,
    /// `T(x) = x S(x,0)`.
    pub t: TSeries,
    /// `E(x) = x D(x,0)`.
    pub e: TSeries,
}

fn bpoly(order: usize, terms: &[(usize, i64, i64, Rat)]) -> BSeries {
    BSeries::from_terms(order, terms)
}

pub fn sd_from_oracle(params: &ChainParams, table: &LawTable) -> SdPair {
    let q = table.q_series(params);
    let order = q.order();
    let (p, qq) = (&params.p, &params.q);
    let one = Rat::one();
    // Q(px, qy) and Q(py, qx).
    let a = q.scale_vars(p, qq);
    let b = q.swap_xy().scale_vars(qq, p);
    let lin = |c: &Rat, x: i64, y: i64| bpoly(order, &[(1, 0, 0, one.clone()), (0, x, y, -c.clone())]);
    let fa = &lin(qq, 1, 0) * &lin(p, 0, 1);
    let fb = &lin(p, 1, 0) * &lin(qq, 0, 1);
    let left = &fa * &a;
    let right = &fb * &b;
    let s = &left + &right;
    let d = &left - &right;
    let sx0 = s.at_y_zero();
    let dx0 = d.at_y_zero();
    SdPair { t: sx0.shift_x(1), e: dx0.shift_x(1), q, s, d, sx0, dx0 }
}

/// `Q(px, 0)` from the oracle, as a series in `t` with coefficients in `x`.
pub fn oracle_qpx0(params: &ChainParams, table: &LawTable) -> TSeries {
    table.q_series(params).scale_vars(&params.p, &Rat::one()).at_y_zero()
}
