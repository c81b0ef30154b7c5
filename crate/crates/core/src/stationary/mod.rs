//! Stationary distribution of the reflected Kreweras chain.
//!
//! Interior steps: West with probability `p`, South with `q`, North-East with
//! `r`. On the x-axis the chain moves West or North-East with `p' = p/(p+r)`,
//! `r' = r/(p+r)`; on the y-axis South or North-East with `q'' = q/(q+r)`,
//! `r'' = r/(q+r)`; from the origin it always moves to `(1, 1)`.

pub mod dd;
mod numeric;
pub mod real;

use std::fmt::Write as _;

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::Report;
use crate::series::{fmt_rat, parse_rat, rat_int, Rat};

pub use numeric::{stationary_numeric, StationaryEstimate};
pub use real::{Real, DEFAULT_PREC};

/// Transition probabilities `(p, q, r)`, exact, positive, summing to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainParams {
    pub p: Rat,
    pub q: Rat,
    pub r: Rat,
}

impl ChainParams {
    pub fn new(p: Rat, q: Rat, r: Rat) -> Result<Self> {
        if !(p.is_positive() && q.is_positive() && r.is_positive()) {
            return Err(Error::InvalidParams(format!(
                "p, q, r must be positive, got {}, {}, {}",
                fmt_rat(&p),
                fmt_rat(&q),
                fmt_rat(&r)
            )));
        }
        let s = &p + &q + &r;
        if !s.is_one() {
            return Err(Error::InvalidParams(format!("p + q + r = {}, expected 1", fmt_rat(&s))));
        }
        Ok(ChainParams { p, q, r })
    }

    pub fn parse(p: &str, q: &str, r: &str) -> Result<Self> {
        Self::new(parse_rat(p)?, parse_rat(q)?, parse_rat(r)?)
    }

    pub fn p_prime(&self) -> Rat {
        &self.p / (&self.p + &self.r)
    }

    pub fn r_prime(&self) -> Rat {
        &self.r / (&self.p + &self.r)
    }

    pub fn q_second(&self) -> Rat {
        &self.q / (&self.q + &self.r)
    }

    pub fn r_second(&self) -> Rat {
        &self.r / (&self.q + &self.r)
    }

    pub fn is_ergodic(&self) -> bool {
        self.r < self.p && self.r < self.q
    }

    pub fn require_ergodic(&self) -> Result<()> {
        if self.is_ergodic() {
            Ok(())
        } else {
            Err(Error::NotErgodic(format!(
                "r = {} is not below min(p, q) = {}; the chain has no stationary distribution",
                fmt_rat(&self.r),
                fmt_rat(if self.p < self.q { &self.p } else { &self.q })
            )))
        }
    }

    /// Exchanges `p` and `q` (mirror image in the diagonal).
    pub fn swapped(&self) -> Self {
        ChainParams { p: self.q.clone(), q: self.p.clone(), r: self.r.clone() }
    }

    pub fn rho(&self) -> Rat {
        &self.p * &self.q * &self.r
    }

    pub fn label(&self) -> String {
        format!("p={} q={} r={}", fmt_rat(&self.p), fmt_rat(&self.q), fmt_rat(&self.r))
    }
}

/// Smallest positive root of `pqr w^3 - w + 2`.
#[derive(Clone, Debug)]
pub struct RootW {
    pub w: Real,
    pub prec: usize,
}

fn cubic(pqr: &Real, z: &Real) -> Real {
    let two = Real::from_i64(2, z.prec());
    &(&(pqr * &z.powi(3)) - z) + &two
}

/// Bisection on `[1/max(p,q), 1/sqrt(pq)]`, then guarded Newton steps.
pub fn solve_w(params: &ChainParams, prec: usize) -> Result<RootW> {
    if params.p == params.q {
        return Ok(RootW { w: Real::from_rat(&params.p.recip(), prec), prec });
    }
    let wp = prec + 32;
    let p = Real::from_rat(&params.p, wp);
    let q = Real::from_rat(&params.q, wp);
    let pqr = Real::from_rat(&params.rho(), wp);
    let mut lo = p.max(&q).recip();
    let mut hi = (&p * &q).sqrt().expect("positive").recip();
    let f_lo = cubic(&pqr, &lo);
    let f_hi = cubic(&pqr, &hi);
    if f_lo.is_negative() || f_hi > Real::zero(wp) {
        return Err(Error::InvalidParams(format!(
            "root bracket [1/max(p,q), 1/sqrt(pq)] has no sign change for {}",
            params.label()
        )));
    }
    for _ in 0..64 {
        let mid = &(&lo + &hi) / &Real::from_i64(2, wp);
        if cubic(&pqr, &mid).is_negative() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let three = Real::from_i64(3, wp);
    let mut w = lo.clone();
    for _ in 0..12 {
        let f = cubic(&pqr, &w);
        let df = &(&three * &(&pqr * &w.powi(2))) - &Real::one(wp);
        if df.is_zero() {
            break;
        }
        let next = &w - &(&f / &df);
        if next < lo || next > hi {
            break;
        }
        w = next;
    }
    let resid = cubic(&pqr, &w).abs();
    if resid > Real::epsilon(prec - 8) {
        return Err(Error::NoConvergence(format!("w residual {}", resid.to_sci(4))));
    }
    Ok(RootW { w: Real::from_f64(0.0, prec) + &w, prec })
}

/// Closed-form evaluator of the stationary generating functions.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub params: ChainParams,
    pub prec: usize,
    pub p: Real,
    pub q: Real,
    pub r: Real,
    pub w: Real,
    pub p00: Real,
}

fn general_p00(p: &Real, q: &Real, r: &Real, w: &Real) -> Real {
    let prec = w.prec();
    let one = Real::one(prec);
    let num = &(&(w * &(p - r)) * &(q - r)) * &(p - q).abs();
    let rad = (&one - &(&(p * q) * &w.powi(2))).sqrt().expect("1 - pq w^2 >= 0");
    let den = &(&(&Real::from_i64(6, prec) * &(p * q)) * &(&one - &(r * w))) * &rad;
    &num / &den
}

/// `p_{0,0}`, with the `p = q` branch `(1/3)(1 - r/p)^{3/2}`.
pub fn p00_closed(params: &ChainParams, prec: usize) -> Result<Real> {
    params.require_ergodic()?;
    if params.p == params.q {
        let base = Real::from_rat(&(Rat::one() - &params.r / &params.p), prec);
        let s = base.sqrt().expect("positive");
        return Ok(&(&base * &s) / &Real::from_i64(3, prec));
    }
    let w = solve_w(params, prec)?.w;
    let (p, q, r) = reals(params, prec);
    Ok(general_p00(&p, &q, &r, &w))
}

/// The `|p - q|` formula evaluated at `(p + eps, p - eps, r)` for a symmetric
/// point `(p, p, r)`: the route by which the `p = q` branch is a limit.
pub fn p00_limit_route(params: &ChainParams, eps: &Rat, prec: usize) -> Result<Real> {
    let shifted = ChainParams::new(&params.p + eps, &params.q - eps, params.r.clone())?;
    p00_closed(&shifted, prec)
}

fn reals(params: &ChainParams, prec: usize) -> (Real, Real, Real) {
    (
        Real::from_rat(&params.p, prec),
        Real::from_rat(&params.q, prec),
        Real::from_rat(&params.r, prec),
    )
}

/// Coefficients of `(1 - c x)^e` for `e = 1/2` (`half = 1`) or `e = -1/2` (`half = -1`).
fn binomial_series(c: &Real, half: i64, n: usize) -> Vec<Real> {
    let prec = c.prec();
    let mut out = vec![Real::one(prec)];
    // a_k = a_{k-1} c (k - 1 - e) / k
    for k in 1..=n {
        let num = Real::from_i64(2 * k as i64 - 2 - half, prec);
        let den = Real::from_i64(2 * k as i64, prec);
        let prev = out[k - 1].clone();
        out.push(&(&(&prev * c) * &num) / &den);
    }
    out
}

/// Multiplies a coefficient list by `1 / (1 - a x)`.
fn divide_geometric(s: &mut [Real], a: &Real) {
    for k in 1..s.len() {
        let add = a * &s[k - 1];
        s[k] = &s[k] + &add;
    }
}

impl ClosedForm {
    pub fn new(params: &ChainParams, prec: usize) -> Result<Self> {
        params.require_ergodic()?;
        let w = solve_w(params, prec)?.w;
        let p00 = p00_closed(params, prec)?;
        let (p, q, r) = reals(params, prec);
        Ok(ClosedForm { params: params.clone(), prec, p, q, r, w, p00 })
    }

    fn one(&self) -> Real {
        Real::one(self.prec)
    }

    fn sqrt(&self, x: Real) -> Real {
        x.sqrt().unwrap_or_else(|| Real::from_f64(f64::NAN, self.prec))
    }

    fn symmetric(&self) -> bool {
        self.params.p == self.params.q
    }

    /// `Q(x, 0)` from the closed form, with `(a, b)` standing for `(p, q)`.
    fn q_axis(&self, a: &Real, b: &Real, x: &Real) -> Real {
        let one = self.one();
        let r = &self.r;
        let w = &self.w;
        if self.symmetric() {
            return &self.p00 / &self.sqrt(&one - &(&(r * x) / a));
        }
        let w2 = w.powi(2);
        let t1 = &(&one - &(x / &(a * w))) * &self.sqrt(&one - &(&(&(x * b) * r) * &w2));
        let t2 = &(&(&(b * x) / a) * &(&one - &(&one / &(b * w)))) * &self.sqrt(&one - &(&(a * r) * &w2));
        let den = &(&one - &(&(b * x) / a)) * &(&one - &(&(r * x) / a));
        &(&self.p00 * &(&t1 - &t2)) / &den
    }

    pub fn qx0(&self, x: &Real) -> Real {
        self.q_axis(&self.p, &self.q, x)
    }

    pub fn q0y(&self, y: &Real) -> Real {
        self.q_axis(&self.q, &self.p, y)
    }

    /// `Q(1, 1) = p / (p - r) Q(0, 1)`.
    pub fn q11(&self) -> Real {
        let one = self.one();
        &(&self.p / &(&self.p - &self.r)) * &self.q0y(&one)
    }

    /// Taylor coefficients `[x^i] Q(x, 0)` for `i <= n`.
    fn axis_coeffs(&self, a: &Real, b: &Real, n: usize) -> Vec<Real> {
        let one = self.one();
        let r = &self.r;
        if self.symmetric() {
            let c = r / a;
            return binomial_series(&c, -1, n).into_iter().map(|v| &v * &self.p00).collect();
        }
        let w = &self.w;
        let w2 = w.powi(2);
        let s = binomial_series(&(&(b * r) * &w2), 1, n);
        let inv_aw = &one / &(a * w);
        let mut num: Vec<Real> = (0..=n)
            .map(|k| if k == 0 { s[0].clone() } else { &s[k] - &(&inv_aw * &s[k - 1]) })
            .collect();
        let lin = &(&(b / a) * &(&one - &(&one / &(b * w)))) * &self.sqrt(&one - &(&(a * r) * &w2));
        if n >= 1 {
            num[1] = &num[1] - &lin;
        }
        divide_geometric(&mut num, &(b / a));
        divide_geometric(&mut num, &(r / a));
        num.into_iter().map(|v| &v * &self.p00).collect()
    }

    pub fn qx0_coeffs(&self, n: usize) -> Vec<Real> {
        self.axis_coeffs(&self.p, &self.q, n)
    }

    pub fn q0y_coeffs(&self, n: usize) -> Vec<Real> {
        self.axis_coeffs(&self.q, &self.p, n)
    }

    /// `p_{i,0}` for `i <= n`: `p_{0,0}`, then `[x^i] Q(x, 0) / r'`.
    pub fn pi0(&self, n: usize) -> Vec<Real> {
        let rp = Real::from_rat(&self.params.r_prime(), self.prec);
        let mut c = self.qx0_coeffs(n);
        for v in c.iter_mut().skip(1) {
            *v = &*v / &rp;
        }
        c
    }

    /// Coefficients `c_{a,b}` of `Q(x, y)` for `a + b <= h`, from the axis
    /// series through the functional equation
    /// `(xy - py - qx - r x^2 y^2) Q = q(xy - x) Q(x,0) + p(xy - y) Q(0,y)`.
    /// Also returns the largest mismatch between the recomputed `c_{a,0}`
    /// and the closed form.
    pub fn q_coeffs(&self, h: usize) -> (Vec<Vec<Real>>, Real) {
        let zero = Real::zero(self.prec);
        let row0 = self.qx0_coeffs(h);
        let col0 = self.q0y_coeffs(h);
        let mut c: Vec<Vec<Real>> = vec![col0];
        let mut mismatch = zero.clone();
        let (p, q, r) = (&self.p, &self.q, &self.r);
        for a in 1..=h {
            let height = h - a;
            let prev = &c[a - 1];
            let prev2 = if a >= 2 { Some(&c[a - 2]) } else { None };
            let get2 = |b: i64| -> Real {
                match prev2 {
                    Some(col) if b >= 0 && (b as usize) < col.len() => col[b as usize].clone(),
                    _ if a == 1 => zero.clone(),
                    _ => zero.clone(),
                }
            };
            let mut col = vec![row0[a].clone()];
            // Coefficient of x^a y^b with b >= 1 determines c_{a, b-1}.
            for b in 1..=height + 1 {
                let mut rhs = &prev[b - 1] - &(q * &prev[b]);
                rhs = &rhs - &(r * &get2(b as i64 - 2));
                if b == 1 {
                    rhs = &rhs - &(q * &prev[0]);
                }
                if a == 1 {
                    rhs = &rhs - &(p * &c[0][b - 1]);
                }
                let v = &rhs / p;
                if b == 1 {
                    let d = (&v - &row0[a]).abs();
                    mismatch = mismatch.max(&d);
                } else {
                    col.push(v);
                }
            }
            c.push(col);
        }
        (c, mismatch)
    }

    /// Stationary probabilities `p_{i,j}` for `i, j <= n`.
    pub fn grid(&self, n: usize) -> (Vec<Vec<Real>>, Real) {
        let (c, mismatch) = self.q_coeffs(2 * n + 2);
        let rp = Real::from_rat(&self.params.r_prime(), self.prec);
        let rs = Real::from_rat(&self.params.r_second(), self.prec);
        let g = (0..=n)
            .map(|i| {
                (0..=n)
                    .map(|j| match (i, j) {
                        (0, 0) => c[0][0].clone(),
                        (_, 0) => &c[i][0] / &rp,
                        (0, _) => &c[0][j] / &rs,
                        _ => &c[i][j] / &self.r,
                    })
                    .collect()
            })
            .collect();
        (g, mismatch)
    }
}

/// Probability of the step `(i, j) -> (k, l)`.
pub fn transition(params: &ChainParams, i: usize, j: usize, k: usize, l: usize) -> Rat {
    let zero = Rat::zero();
    let ne = k == i + 1 && l == j + 1;
    match (i > 0, j > 0) {
        (false, false) => if ne { Rat::one() } else { zero },
        (true, false) => {
            if ne {
                params.r_prime()
            } else if k + 1 == i && l == 0 {
                params.p_prime()
            } else {
                zero
            }
        }
        (false, true) => {
            if ne {
                params.r_second()
            } else if k == 0 && l + 1 == j {
                params.q_second()
            } else {
                zero
            }
        }
        (true, true) => {
            if ne {
                params.r.clone()
            } else if k + 1 == i && l == j {
                params.p.clone()
            } else if k == i && l + 1 == j {
                params.q.clone()
            } else {
                zero
            }
        }
    }
}

/// `max |p_{k,l} - sum p_{i,j} T(i,j;k,l)|` over `k, l < n` for a grid of size `n + 1`.
pub fn stationarity_residual(params: &ChainParams, g: &[Vec<Real>], prec: usize) -> Real {
    let n = g.len() - 1;
    let mut worst = Real::zero(prec);
    for k in 0..n {
        for l in 0..n {
            let mut inflow = Real::zero(prec);
            let mut sources = vec![(k + 1, l), (k, l + 1)];
            if k > 0 && l > 0 {
                sources.push((k - 1, l - 1));
            }
            for (i, j) in sources {
                let t = transition(params, i, j, k, l);
                if !t.is_zero() {
                    inflow = &inflow + &(&g[i][j] * &Real::from_rat(&t, prec));
                }
            }
            worst = worst.max(&(&g[k][l] - &inflow).abs());
        }
    }
    worst
}

fn close(a: &Real, b: &Real, tol: f64) -> (bool, String) {
    let d = (a - b).abs().to_f64();
    (d <= tol, format!("{} vs {} (diff {:.3e})", a.to_sci(12), b.to_sci(12), d))
}

/// `Q(1,0) = (q-r)/(3q)`, `Q(0,1) = (p-r)/(3p)`, `Q(1,1) = p/(p-r) Q(0,1) = q/(q-r) Q(1,0)`,
/// normalization of the closed form, and, given an estimate, `(p - rx) Q(x,1) = p Q(0,1)`.
pub fn verify_balance_identities(
    params: &ChainParams,
    prec: usize,
    estimate: Option<&StationaryEstimate>,
    tol: f64,
) -> Result<Report> {
    let cf = ClosedForm::new(params, prec)?;
    let mut rep = Report::new(format!("balance {}", params.label()));
    let one = Real::one(prec);
    let zero = Real::zero(prec);
    let q10 = cf.qx0(&one);
    let q01 = cf.q0y(&one);
    let target10 = Real::from_rat(&((&params.q - &params.r) / (rat_int(3) * &params.q)), prec);
    let target01 = Real::from_rat(&((&params.p - &params.r) / (rat_int(3) * &params.p)), prec);
    let (ok, d) = close(&q10, &target10, 1e-40);
    rep.check("Q(1,0) = (q-r)/(3q)", ok, d);
    let (ok, d) = close(&q01, &target01, 1e-40);
    rep.check("Q(0,1) = (p-r)/(3p)", ok, d);
    let via_q = &(&cf.q / &(&cf.q - &cf.r)) * &q10;
    let (ok, d) = close(&cf.q11(), &via_q, 1e-40);
    rep.check("p/(p-r) Q(0,1) = q/(q-r) Q(1,0)", ok, d);
    if cf.symmetric() {
        let alt = &cf.p00 / &(&one - &(&cf.r / &cf.p)).sqrt().expect("positive");
        let (ok, d) = close(&q10, &alt, 1e-40);
        rep.check("p = q: Q(1,0) = Q(0,0)/sqrt(1 - r/p)", ok, d);
    }
    let rp = Real::from_rat(&params.r_prime(), prec);
    let rs = Real::from_rat(&params.r_second(), prec);
    let q00 = cf.qx0(&zero);
    let p1 = &(&q10 - &q00) / &rp;
    let p2 = &(&q01 - &q00) / &rs;
    let pint = &(&(&(&cf.q11() - &q10) - &q01) + &q00) / &cf.r;
    let total = &(&(&cf.p00 + &p1) + &p2) + &pint;
    let (ok, d) = close(&total, &one, tol);
    rep.check("closed-form normalization", ok, d);

    if let Some(est) = estimate {
        let (ok, d) = close(&Real::from_f64(est.mass, prec), &one, tol);
        rep.check("numeric normalization", ok, d);
        let q0_1 = Real::from_f64(est.q_value(params, 0.0, 1.0), prec);
        for &x in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            let qx1 = est.q_value(params, x, 1.0);
            let lhs = (cf.p.to_f64() - cf.r.to_f64() * x) * qx1;
            let rhs = cf.p.to_f64() * q0_1.to_f64();
            let dd = (lhs - rhs).abs();
            rep.check(
                format!("(p - r x) Q(x,1) = p Q(0,1) at x = {x}"),
                dd <= tol,
                format!("{lhs:.15e} vs {rhs:.15e} (diff {dd:.3e})"),
            );
        }
    }
    Ok(rep)
}

/// The factored forms of the stationary sections against the closed form; needs `p < q`.
pub fn factored_forms(params: &ChainParams, prec: usize, samples: usize, tol: f64) -> Result<Report> {
    if params.p >= params.q {
        return Err(Error::InvalidParams(format!(
            "the factored forms hold only for p < q, got {}",
            params.label()
        )));
    }
    let cf = ClosedForm::new(params, prec)?;
    let one = Real::one(prec);
    let w2 = cf.w.powi(2);
    let (p, q, r) = (&cf.p, &cf.q, &cf.r);
    let sq = |v: Real| v.sqrt().expect("nonnegative radicand");
    let s_qr = sq(&one - &(&(q * r) * &w2));
    let s_pr = sq(&one - &(&(p * r) * &w2));
    let s_pq = sq(&one - &(&(p * q) * &w2));
    let phi = |x: &Real| {
        let s = sq(&one - &(&(&(x * q) * r) * &w2));
        &(&s + &s_qr) / &(&(&s + &s_pr) * &(&s - &s_pq))
    };
    let psi = |y: &Real| {
        let d = sq(&one - &(&(&(y * p) * r) * &w2));
        &(&d + &s_pr) / &(&(&d + &s_qr) * &(&d + &s_pq))
    };
    let zero = Real::zero(prec);
    let phi0 = phi(&zero);
    let psi0 = psi(&zero);
    let mut rep = Report::new(format!("factored forms {}", params.label()));
    let mut worst_x = 0.0f64;
    let mut worst_y = 0.0f64;
    let mut points: Vec<Real> = (0..samples)
        .map(|k| Real::from_rat(&Rat::new((2 * k as i64 + 1).into(), (2 * samples as i64).into()), prec))
        .collect();
    points.push(one.clone());
    for x in &points {
        let fx = &(&cf.p00 * &phi(x)) / &phi0;
        worst_x = worst_x.max((&fx - &cf.qx0(x)).abs().to_f64());
        let fy = &(&cf.p00 * &psi(x)) / &psi0;
        worst_y = worst_y.max((&fy - &cf.q0y(x)).abs().to_f64());
    }
    rep.check(
        "Q(x,0) = Q(0,0) Phi(x)/Phi(0)",
        worst_x <= tol,
        format!("max diff {worst_x:.3e} over {} points", points.len()),
    );
    rep.check(
        "Q(0,y) = Q(0,0) Psi(y)/Psi(0)",
        worst_y <= tol,
        format!("max diff {worst_y:.3e} over {} points", points.len()),
    );
    Ok(rep)
}

/// Root identities and bounds for `w`.
pub fn verify_root_identities(params: &ChainParams, prec: usize, tol: f64) -> Result<Report> {
    let mut rep = Report::new(format!("root w {}", params.label()));
    let w = solve_w(params, prec)?.w;
    let (p, q, r) = reals(params, prec);
    let one = Real::one(prec);
    let w2 = w.powi(2);
    let id = |a: &Real, b: &Real, c: &Real| {
        (&(a * &w) - &one).powi(2) * (&one - &(&(b * c) * &w2))
    };
    let i1 = id(&p, &q, &r);
    let i2 = id(&q, &p, &r);
    let i3 = id(&r, &p, &q);
    let d12 = (&i1 - &i2).abs().to_f64();
    let d13 = (&i1 - &i3).abs().to_f64();
    rep.check(
        "(pw-1)^2(1-qrw^2) = (qw-1)^2(1-prw^2) = (rw-1)^2(1-pqw^2)",
        d12 <= tol && d13 <= tol,
        format!("diffs {d12:.3e}, {d13:.3e}"),
    );
    let (m, big_m) = if p <= q { (p.clone(), q.clone()) } else { (q.clone(), p.clone()) };
    let chain = [
        big_m.recip(),
        w.clone(),
        (&p * &q).sqrt().expect("positive").recip(),
        m.recip(),
        r.recip(),
    ];
    let slack = Real::epsilon(prec / 2);
    let symmetric = params.p == params.q;
    let mut ok = true;
    let mut detail = String::new();
    for k in 0..4 {
        let gap = &chain[k + 1] - &chain[k];
        let strict = k == 3 || !symmetric;
        let fine = if strict { gap > slack } else { gap.abs() <= slack };
        if !fine {
            ok = false;
            let _ = write!(detail, "link {k} gap {}; ", gap.to_sci(4));
        }
    }
    rep.check(
        "1/M <= w <= 1/sqrt(pq) <= 1/m < 1/r, equalities iff p = q",
        ok,
        if ok { "ok".into() } else { detail },
    );
    let a = &(&(&big_m * &w) - &one) * &(&one - &(&(&m * &r) * &w2)).sqrt().expect("positive");
    let b = -&(&(&(&m * &w) - &one) * &(&one - &(&(&big_m * &r) * &w2)).sqrt().expect("positive"));
    let c = -&(&(&(&r * &w) - &one) * &(&one - &(&(&p * &q) * &w2)).sqrt().expect("positive"));
    let dab = (&a - &b).abs().to_f64();
    let dac = (&a - &c).abs().to_f64();
    rep.check(
        "0 <= (Mw-1)sqrt(1-mrw^2) = -(mw-1)sqrt(1-Mrw^2) = -(rw-1)sqrt(1-pqw^2)",
        !a.is_negative() && dab <= tol && dac <= tol,
        format!("value {}, diffs {dab:.3e}, {dac:.3e}", a.to_sci(8)),
    );
    Ok(rep)
}

/// `Q(px,0)/(1-px) - Q(0,qx)/(1-qx)` against its closed form, and its
/// vanishing exactly when `p = q`.
pub fn asymmetry_witness(params: &ChainParams, prec: usize, samples: usize, tol: f64) -> Result<Report> {
    let cf = ClosedForm::new(params, prec)?;
    let one = Real::one(prec);
    let (p, q, r, w) = (&cf.p, &cf.q, &cf.r, &cf.w);
    let s_qr = (&one - &(&(q * r) * &w.powi(2))).sqrt().expect("positive");
    let mut worst = 0.0f64;
    let mut largest = 0.0f64;
    for k in 0..samples {
        let x = Real::from_rat(&Rat::new((2 * k as i64 + 1).into(), (2 * samples as i64).into()), prec);
        let px = p * &x;
        let qx = q * &x;
        let lhs = &(&cf.qx0(&px) / &(&one - &px)) - &(&cf.q0y(&qx) / &(&one - &qx));
        let num = &(&(&Real::from_i64(2, prec) * &cf.p00) * &x) * &(&(&(p * w) - &one) * &s_qr);
        let den = &(&(w * &(&one - &px)) * &(&one - &qx)) * &(&one - &(r * &x));
        let rhs = &num / &den;
        worst = worst.max((&lhs - &rhs).abs().to_f64());
        largest = largest.max(lhs.abs().to_f64());
    }
    let mut rep = Report::new(format!("asymmetry {}", params.label()));
    rep.check("difference matches its closed form", worst <= tol, format!("max diff {worst:.3e}"));
    if params.p == params.q {
        rep.check("difference vanishes for p = q", largest <= tol, format!("max {largest:.3e}"));
    } else {
        rep.check("difference is nonzero for p != q", largest > 1e-6, format!("max {largest:.3e}"));
    }
    Ok(rep)
}

/// Least-squares fit `log p_{i,0} = a + i log(rate) + exponent log i`.
#[derive(Clone, Debug, Serialize)]
pub struct TailFit {
    pub regime: String,
    pub rate: f64,
    pub exponent: f64,
    pub expected_rate: f64,
    pub expected_exponent: f64,
    pub i_lo: usize,
    pub i_hi: usize,
}

impl TailFit {
    pub fn rate_ok(&self) -> bool {
        (self.rate / self.expected_rate - 1.0).abs() <= 0.01
    }

    /// 5% relative, or 0.05 absolute when the expected exponent is 0.
    pub fn exponent_ok(&self) -> bool {
        let err = (self.exponent - self.expected_exponent).abs();
        if self.expected_exponent == 0.0 {
            err <= 0.05
        } else {
            err <= 0.05 * self.expected_exponent.abs()
        }
    }
}

fn solve3(m: [[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    let det = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let d = det(m);
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut a = m;
        for row in 0..3 {
            a[row][k] = v[row];
        }
        *o = det(a) / d;
    }
    out
}

pub fn fit_tail(values: &[Real], i_lo: usize, i_hi: usize) -> (f64, f64) {
    let mut m = [[0.0; 3]; 3];
    let mut v = [0.0; 3];
    for (i, val) in values.iter().enumerate().take(i_hi + 1).skip(i_lo) {
        let y = val.to_f64().ln();
        let row = [1.0, i as f64, (i as f64).ln()];
        for a in 0..3 {
            v[a] += row[a] * y;
            for b in 0..3 {
                m[a][b] += row[a] * row[b];
            }
        }
    }
    let sol = solve3(m, v);
    (sol[1].exp(), sol[2])
}

/// Fits the tail of `p_{i,0}` over `[i_max/2, i_max]`.
pub fn asymptotics_fit(params: &ChainParams, prec: usize, i_max: usize) -> Result<TailFit> {
    if i_max < 40 {
        return Err(Error::InvalidParams(format!("i_max must be at least 40, got {i_max}")));
    }
    let cf = ClosedForm::new(params, prec)?;
    let pi0 = cf.pi0(i_max);
    if let Some(bad) = pi0.iter().position(|v| !v.is_finite() || v.partial_cmp(&Real::zero(prec)) != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::NoConvergence(format!(
            "p_{{{bad},0}} = {} is not positive; raise the precision",
            pi0[bad].to_sci(6)
        )));
    }
    let (i_lo, i_hi) = (i_max / 2, i_max);
    let (rate, exponent) = fit_tail(&pi0, i_lo, i_hi);
    let (regime, expected_rate, expected_exponent) = if params.p == params.q {
        ("p = q", (&cf.r / &cf.p).to_f64(), -0.5)
    } else if params.p < params.q {
        ("p < q", (&cf.r / &cf.p).to_f64(), 0.0)
    } else {
        ("p > q", (&(&cf.q * &cf.r) * &cf.w.powi(2)).to_f64(), -1.5)
    };
    Ok(TailFit {
        regime: regime.into(),
        rate,
        exponent,
        expected_rate,
        expected_exponent,
        i_lo,
        i_hi,
    })
}

pub fn asymptotics_check(params: &ChainParams, prec: usize, i_max: usize) -> Result<(Report, TailFit)> {
    let fit = asymptotics_fit(params, prec, i_max)?;
    let mut rep = Report::new(format!("asymptotics {} ({})", params.label(), fit.regime));
    rep.check(
        "decay rate within 1%",
        fit.rate_ok(),
        format!("fitted {:.6}, expected {:.6}", fit.rate, fit.expected_rate),
    );
    rep.check(
        "polynomial exponent within 5%",
        fit.exponent_ok(),
        format!("fitted {:.4}, expected {:.4}", fit.exponent, fit.expected_exponent),
    );
    Ok((rep, fit))
}

/// Closed form against a power-iteration estimate: `p_{0,0}`, `p_{i,0}` for
/// `i <= n` and the interior grid reconstruction.
pub fn compare_with_numeric(
    params: &ChainParams,
    prec: usize,
    est: &StationaryEstimate,
    n: usize,
    tol: f64,
) -> Result<Report> {
    let cf = ClosedForm::new(params, prec)?;
    let mut rep = Report::new(format!("closed vs numeric {}", params.label()));
    let d00 = (cf.p00.to_f64() - est.get(0, 0)).abs();
    rep.check("p00", d00 <= tol, format!("closed {} numeric {:.15e} diff {d00:.3e}", cf.p00.to_sci(15), est.get(0, 0)));
    let pi0 = cf.pi0(n);
    let worst = (0..=n)
        .map(|i| (pi0[i].to_f64() - est.get(i, 0)).abs())
        .fold(0.0f64, f64::max);
    rep.check(format!("p_{{i,0}}, i <= {n}"), worst <= tol, format!("max diff {worst:.3e}"));
    let (g, mismatch) = cf.grid(n);
    let worst_grid = (0..=n)
        .flat_map(|i| (0..=n).map(move |j| (i, j)))
        .map(|(i, j)| (g[i][j].to_f64() - est.get(i, j)).abs())
        .fold(0.0f64, f64::max);
    rep.check(
        format!("p_{{i,j}}, i, j <= {n}"),
        worst_grid <= tol,
        format!("max diff {worst_grid:.3e}"),
    );
    let m = mismatch.to_f64();
    rep.check("reconstruction reproduces Q(x,0)", m <= tol, format!("max diff {m:.3e}"));
    let resid = stationarity_residual(params, &g, prec).to_f64();
    rep.check("closed-form grid is stationary", resid <= tol, format!("max residual {resid:.3e}"));
    Ok(rep)
}

/// The `p = q` value against the `|p - q|` formula at `(p + e, p - e, r)`
/// for shrinking `e`.
pub fn verify_limit_route(params: &ChainParams, prec: usize) -> Result<Report> {
    let mut rep = Report::new(format!("p = q limit {}", params.label()));
    let exact = p00_closed(params, prec)?;
    let third = &Real::one(prec) / &Real::from_i64(3, prec);
    let base = Real::from_rat(&(Rat::one() - &params.r / &params.p), prec);
    let direct = &(&base * &base.sqrt().expect("positive")) * &third;
    let d0 = (&exact - &direct).abs().to_f64();
    rep.check("p00 = (1/3)(1 - r/p)^(3/2)", d0 <= 1e-60, format!("diff {d0:.3e}"));
    let mut diffs = Vec::new();
    for k in [4u32, 8, 12, 16] {
        let eps = parse_rat(&format!("1/1{}", "0".repeat(k as usize)))?;
        let v = p00_limit_route(params, &eps, prec)?;
        diffs.push((&v - &exact).abs().to_f64());
    }
    let shrinking = diffs.windows(2).all(|w| w[1] < w[0]);
    let last = *diffs.last().expect("nonempty");
    rep.check(
        "|p - q| formula tends to the p = q branch",
        shrinking && last < 1e-30,
        format!("{:?}", diffs.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>()),
    );
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    fn params(p: (i64, i64), q: (i64, i64), r: (i64, i64)) -> ChainParams {
        ChainParams::new(rat(p.0, p.1), rat(q.0, q.1), rat(r.0, r.1)).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ChainParams::parse("1/3", "1/3", "1/4").is_err());
        assert!(ChainParams::parse("0", "1/2", "1/2").is_err());
        let c = params((1, 3), (1, 2), (1, 6));
        assert!(c.is_ergodic());
        assert_eq!(c.p_prime(), rat(2, 3));
        assert_eq!(c.r_second(), rat(1, 4));
        assert!(!params((1, 6), (1, 3), (1, 2)).is_ergodic());
    }

    #[test]
    fn w_symmetric_is_one_over_p() {
        let c = params((2, 5), (2, 5), (1, 5));
        let w = solve_w(&c, 128).unwrap().w;
        assert!((w.to_f64() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn w_root_of_cubic() {
        // pqr = 1/36: w^3 - 36 w + 72 = 0 on [2, sqrt 6].
        let c = params((1, 3), (1, 2), (1, 6));
        let w = solve_w(&c, 256).unwrap().w;
        let wf = w.to_f64();
        assert!((2.0..=6f64.sqrt()).contains(&wf));
        assert!((wf.powi(3) - 36.0 * wf + 72.0).abs() < 1e-9);
    }

    #[test]
    fn p00_symmetric_value() {
        let c = params((2, 5), (2, 5), (1, 5));
        let v = p00_closed(&c, 128).unwrap().to_f64();
        assert!((v - 2f64.sqrt() / 12.0).abs() < 1e-15);
    }

    #[test]
    fn non_ergodic_rejected() {
        let c = params((1, 6), (1, 3), (1, 2));
        assert!(matches!(p00_closed(&c, 64), Err(Error::NotErgodic(_))));
    }

    #[test]
    fn coefficients_resum_to_q10() {
        let c = params((1, 3), (1, 2), (1, 6));
        let cf = ClosedForm::new(&c, 256).unwrap();
        let coeffs = cf.qx0_coeffs(200);
        let s = coeffs.iter().fold(Real::zero(256), |a, v| &a + v);
        let q10 = cf.qx0(&Real::one(256));
        assert!((&s - &q10).abs().to_f64() < 1e-30);
        assert!((q10.to_f64() - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn balance_and_roots() {
        for c in [params((1, 3), (1, 2), (1, 6)), params((2, 5), (2, 5), (1, 5))] {
            let rep = verify_balance_identities(&c, 256, None, 1e-12).unwrap();
            assert!(rep.passed(), "{:?}", rep.failures());
            let rep = verify_root_identities(&c, 256, 1e-25).unwrap();
            assert!(rep.passed(), "{:?}", rep.failures());
            let rep = asymmetry_witness(&c, 256, 10, 1e-30).unwrap();
            assert!(rep.passed(), "{:?}", rep.failures());
        }
    }

    #[test]
    fn factored_forms_need_p_below_q() {
        let c = params((1, 3), (1, 2), (1, 6));
        let rep = factored_forms(&c, 256, 20, 1e-12).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures());
        assert!(factored_forms(&c.swapped(), 256, 20, 1e-12).is_err());
    }

    #[test]
    fn closed_grid_is_stationary() {
        let c = params((1, 3), (1, 2), (1, 6));
        let cf = ClosedForm::new(&c, 256).unwrap();
        let (g, mismatch) = cf.grid(12);
        assert!(mismatch.to_f64() < 1e-40);
        assert!(stationarity_residual(&c, &g, 256).to_f64() < 1e-40);
        assert!(g.iter().flatten().all(|v| !v.is_negative()));
    }
}
