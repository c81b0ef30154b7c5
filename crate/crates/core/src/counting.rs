//! Closed-form generating functions for Kreweras walks and their verification.
//!
//! `Q(x, y; t) = sum a_{i,j}(n) x^i y^j t^n`. Everything here is exact; the
//! closed forms are expanded with a few extra orders of padding so the
//! `1/t` and `xbar` artifacts cancel inside the reliable window.

use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{compute_y0, discriminant, symmetric_functions, KernelParams};
use crate::report::Report;
use crate::series::{rat, rat_int, solve_valuation_fixed_point, BSeries, Rat, TSeries};
use crate::walks::{axis_count, build_walk_table};

/// Padding absorbing the `1/(2 t^2)` cancellation in `Q(x, 0)`.
const PAD: i64 = 3;

#[derive(Clone, Debug)]
pub struct CountingBundle {
    pub q_full: BSeries,
    pub q_x0: TSeries,
    pub q_diag: TSeries,
    pub w: TSeries,
}

pub fn counting_bundle(order: usize) -> Result<CountingBundle> {
    Ok(CountingBundle {
        q_full: q_full_by_recurrence(order),
        q_x0: q_x0_closed(order)?,
        q_diag: q_diag_closed(order)?,
        w: w_series(order as i64)?,
    })
}

/// `W = t (2 + W^3)`.
pub fn w_series(order: i64) -> Result<TSeries> {
    solve_valuation_fixed_point(
        |u| (&TSeries::constant(rat_int(2)) + &u.pow(3)).shift_t(1),
        order,
    )
}

/// Builds `Q` one `t`-layer at a time from
/// `Q_n = xy Q_{n-1} + xbar (Q_{n-1} - Q_{n-1}(0, y)) + ybar (Q_{n-1} - Q_{n-1}(x, 0))`.
pub fn q_full_by_recurrence(order: usize) -> BSeries {
    let mut q = BSeries::zero(order);
    if order == 0 {
        return q;
    }
    q.add_term(0, 0, 0, Rat::one());
    for n in 1..order {
        let prev: Vec<((i64, i64), Rat)> =
            q.layer(n - 1).iter().map(|(k, v)| (*k, v.clone())).collect();
        for ((i, j), v) in prev {
            q.add_term(n, i + 1, j + 1, v.clone());
            if i > 0 {
                q.add_term(n, i - 1, j, v.clone());
            }
            if j > 0 {
                q.add_term(n, i, j - 1, v);
            }
        }
    }
    q
}

fn require_power_series_in_x(s: &TSeries, what: &str) -> Result<()> {
    if s.valuation() < 0 {
        return Err(Error::IdentityFailed(format!("{what}: residual t^{}", s.valuation())));
    }
    if let Some((lo, _)) = s.x_range() {
        if lo < 0 {
            return Err(Error::IdentityFailed(format!("{what}: residual x^{lo}")));
        }
    }
    Ok(())
}

/// `Q(x, 0) = (1/(tx)) (1/(2t) - xbar - (1/W - xbar) sqrt(1 - x W^2))`.
pub fn q_x0_closed(order: usize) -> Result<TSeries> {
    let p = order as i64 + PAD;
    let w = w_series(p)?;
    q_x0_from_w(&w, order as i64)
}

fn q_x0_from_w(w: &TSeries, order: i64) -> Result<TSeries> {
    let s = (&TSeries::one() - &(w * w).shift_x(1)).sqrt()?;
    let winv = w.invert()?;
    let inner = &(&TSeries::monomial(rat(1, 2), -1, 0) - &TSeries::xbar())
        - &(&(&winv - &TSeries::xbar()) * &s);
    let q = inner.shift_t(-1).shift_x(-1).truncate(order);
    if q.prec() < order {
        return Err(Error::WindowExhausted(format!("Q(x,0) known only below t^{}", q.prec())));
    }
    require_power_series_in_x(&q, "Q(x,0)")?;
    Ok(q)
}

/// `[x^i] Q(x, 0) = W^{2i+1} / (2 4^i t) (C_i - C_{i+1} W^3 / 4)`.
pub fn axis_gf_closed(i: u64, order: usize) -> Result<TSeries> {
    let w = w_series(order as i64 + 1)?;
    let ci = Rat::from_integer(crate::walks::catalan(i).into());
    let cn = Rat::from_integer(crate::walks::catalan(i + 1).into());
    let bracket = &TSeries::constant(ci) - &w.pow(3).scale(&(cn * rat(1, 4)));
    let pref = Rat::one() / (rat_int(2) * num::pow(rat_int(4), i as usize));
    let out = (&w.pow(2 * i as u32 + 1) * &bracket).scale(&pref).shift_t(-1);
    Ok(out.truncate(order as i64))
}

/// Diagonal: `t Q_d = (W - xbar) / sqrt(1 - x W (1 + W^3/4) + x^2 W^2 / 4) + xbar`.
pub fn q_diag_closed(order: usize) -> Result<TSeries> {
    let w = w_series(order as i64 + 1)?;
    let quarter = rat(1, 4);
    let lin = (&w * &(&TSeries::one() + &w.pow(3).scale(&quarter))).shift_x(1);
    let rad = &(&TSeries::one() - &lin) + &(&w * &w).scale(&quarter).shift_x(2);
    let num = &w - &TSeries::xbar();
    let tq = &(&num * &rad.sqrt()?.invert()?) + &TSeries::xbar();
    let q = tq.shift_t(-1).truncate(order as i64);
    if q.prec() < order as i64 {
        return Err(Error::WindowExhausted(format!("Q_d known only below t^{}", q.prec())));
    }
    require_power_series_in_x(&q, "Q_d")?;
    Ok(q)
}

/// `t (x/W - 1) sqrt(1 - x W^2)`, a power series in `t` that is polynomial in `x`.
fn half_numerator(order: i64) -> Result<TSeries> {
    let w = w_series(order + 2)?;
    let s = (&TSeries::one() - &(&w * &w).shift_x(1)).sqrt()?;
    let f = &w.invert()?.shift_x(1) - &TSeries::one();
    let m = (&f * &s).shift_t(1).truncate(order);
    require_power_series_in_x(&m, "numerator")?;
    Ok(m)
}

/// `xy - t (x + y + x^2 y^2)` as a bivariate series.
fn kernel_bseries(order: usize) -> BSeries {
    let one = Rat::one();
    BSeries::from_terms(
        order,
        &[
            (0, 1, 1, one.clone()),
            (1, 1, 0, -one.clone()),
            (1, 0, 1, -one.clone()),
            (1, 2, 2, -one),
        ],
    )
}

/// Right-hand side `y M(x) + x M(y)` of `K (xyt Q + 1) = xyt (N(x) + N(y))`.
fn numerator_bseries(order: usize) -> Result<BSeries> {
    let m = half_numerator(order as i64)?;
    let mx = BSeries::from_x_series(&m, order);
    let ybs = BSeries::from_terms(order, &[(0, 0, 1, Rat::one())]);
    let xbs = BSeries::from_terms(order, &[(0, 1, 0, Rat::one())]);
    Ok(&(&mx * &ybs) + &(&mx.swap_xy() * &xbs))
}

/// Reconstructs `Q(x, y)` from the closed form by peeling off one `t`-layer of
/// `U = xytQ + 1` at a time: `xy U_n = R_n + (x + y + x^2 y^2) U_{n-1}`.
pub fn q_full_closed(order: usize) -> Result<BSeries> {
    let r = numerator_bseries(order + 1)?;
    let mut u = BSeries::zero(order + 1);
    let mut q = BSeries::zero(order);
    for n in 0..=order {
        let mut layer: Vec<((i64, i64), Rat)> =
            r.layer(n).iter().map(|(k, v)| (*k, v.clone())).collect();
        if n > 0 {
            for (&(i, j), v) in u.layer(n - 1) {
                layer.push(((i + 1, j), v.clone()));
                layer.push(((i, j + 1), v.clone()));
                layer.push(((i + 2, j + 2), v.clone()));
            }
        }
        for ((i, j), v) in layer {
            u.add_term(n, i - 1, j - 1, v);
        }
    }
    for n in 0..=order {
        for (&(i, j), v) in u.layer(n) {
            if n == 0 && (i, j) == (0, 0) {
                continue;
            }
            if n == 0 || i < 1 || j < 1 {
                return Err(Error::IdentityFailed(format!(
                    "xytQ + 1 has stray term t^{n} x^{i} y^{j}"
                )));
            }
            q.add_term(n - 1, i - 1, j - 1, v.clone());
        }
    }
    if u.coeff(0, 0, 0) != Rat::one() {
        return Err(Error::IdentityFailed("constant term of xytQ + 1 is not 1".into()));
    }
    Ok(q)
}

/// `K (xyt Q + 1) = xyt (N(x) + N(y))`, checked against `Q` from the recurrence.
pub fn verify_q_xy_closed(order: usize) -> Result<Report> {
    let mut rep = Report::new("Q(x,y) closed form");
    let q = q_full_by_recurrence(order);
    let mut shifted = BSeries::zero(order + 1);
    shifted.add_term(0, 0, 0, Rat::one());
    for n in 0..order {
        for (&(i, j), v) in q.layer(n) {
            shifted.add_term(n + 1, i + 1, j + 1, v.clone());
        }
    }
    let lhs = &kernel_bseries(order + 1) * &shifted;
    let rhs = numerator_bseries(order + 1)?;
    match lhs.first_difference(&rhs, order + 1) {
        None => rep.check("K (xytQ + 1) = xyt (N(x) + N(y))", true, format!("to t^{order}")),
        Some((n, i, j, d)) => {
            rep.check("K (xytQ + 1) = xyt (N(x) + N(y))", false, format!("t^{n} x^{i} y^{j}: {d}"))
        }
    }
    rep.check("numerator symmetric in x, y", rhs == rhs.swap_xy(), "");
    let closed = q_full_closed(order)?;
    match closed.first_difference(&q, order) {
        None => rep.check("closed-form Q(x,y) = recurrence", true, format!("to t^{}", order - 1)),
        Some((n, i, j, d)) => {
            rep.check("closed-form Q(x,y) = recurrence", false, format!("t^{n} x^{i} y^{j}: {d}"))
        }
    }
    Ok(rep)
}

/// `R(x) = x t Q(x, 0)`.
pub fn r_series(order: usize) -> Result<TSeries> {
    Ok(q_x0_closed(order)?.shift_t(1).shift_x(1).truncate(order as i64))
}

/// `sum r_{n,i} t^n f_i` where `f_i` are exact Laurent series whose valuation
/// is at least `-i`, relying on `r_{n,i} = 0` unless `n >= 2i - 1`.
fn symmetric_sum(r: &TSeries, f: &[TSeries]) -> Result<TSeries> {
    let mut acc = TSeries::zero_to(r.prec() / 2);
    for (n, p) in r.iter() {
        for (i, c) in p.terms() {
            if n < 2 * i - 1 {
                return Err(Error::IdentityFailed(format!("R has t^{n} x^{i} with n < 2i - 1")));
            }
            acc = &acc + &f[i as usize].shift_t(n).scale(c);
        }
    }
    Ok(acc)
}

/// `R(x) + R(Y0) = x Y0`, `R(Y0) + R(Y1) = xbar`, and the divided difference
/// `sqrt(Delta) ((R(Y0) - R(Y1)) / (Y0 - Y1) - x) = t x (2R + 2 xbar - 1/t)`.
///
/// `R(Y1)` is reached only through power sums `Y0^i + Y1^i` and complete
/// homogeneous sums of the roots, both polynomial in `e1`, `e2`; the second
/// and third identities hold below `t^order`, which needs `R` to `2 order`.
pub fn verify_kernel_equation_r(order: usize) -> Result<Report> {
    let mut rep = Report::new("kernel equation for R");
    let n = order as i64;
    let r = r_series(order)?;
    let y0 = compute_y0(&KernelParams::counting(n))?;
    let ry0 = r.compose_x(&y0)?;
    let lhs = &r + &ry0;
    let rhs = y0.shift_x(1);
    rep.record("R(x) + R(Y0) = x Y0", lhs.check_eq(&rhs, n, "R(x)+R(Y0)"));
    rep.check(
        "R(Y0) has no constant term",
        ry0.coeff(0).is_zero(),
        format!("[t^1] R(Y0) = {}", ry0.coeff(1)),
    );

    let long = 2 * order + 1;
    let r2 = r_series(long)?;
    let (e1, e2) = symmetric_functions(&Rat::one());
    let deg = r2.x_range().map_or(0, |(_, hi)| hi.max(0)) as usize;
    let mut power = vec![TSeries::constant(rat_int(2)), e1.clone()];
    let mut homog = vec![TSeries::one(), e1.clone()];
    while power.len() <= deg + 1 {
        let k = power.len();
        power.push(&(&e1 * &power[k - 1]) - &(&e2 * &power[k - 2]));
        homog.push(&(&e1 * &homog[k - 1]) - &(&e2 * &homog[k - 2]));
    }
    let sum = symmetric_sum(&r2, &power)?;
    rep.record("R(Y0) + R(Y1) = xbar", sum.check_eq(&TSeries::xbar(), n, "R(Y0)+R(Y1)"));

    // h_{i-1} = (Y0^i - Y1^i) / (Y0 - Y1); index shifted by one.
    let mut dd_basis = vec![TSeries::zero()];
    dd_basis.extend(homog.iter().cloned());
    let dd = symmetric_sum(&r2, &dd_basis)?;
    let sq = discriminant(&Rat::one()).truncate(n + 2).sqrt()?;
    let left = &sq * &(&dd - &TSeries::x());
    let inner = &(&r2.scale(&rat_int(2)) + &TSeries::xbar().scale(&rat_int(2)))
        - &TSeries::monomial(Rat::one(), -1, 0);
    let right = inner.shift_t(1).shift_x(1);
    rep.record("divided difference times sqrt(Delta)", left.check_eq(&right, n, "divided difference"));
    Ok(rep)
}

/// One row of the closed-form versus oracle comparison on the x-axis.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct AxisRow {
    pub i: i64,
    pub n: i64,
    pub closed: String,
    pub formula: String,
    pub oracle: String,
    pub agree: bool,
}

/// `[x^i t^n] Q(x, 0)` from the closed form, from the product formula and
/// from the walk table, for `i <= max_i` and `n < order`.
pub fn axis_comparison(order: usize, max_i: usize) -> Result<Vec<AxisRow>> {
    let q = q_x0_closed(order)?;
    let table = build_walk_table(order.saturating_sub(1));
    let mut rows = Vec::new();
    for n in 0..order as i64 {
        for i in 0..=(max_i as i64).min(n) {
            let closed = q.coeff_xt(n, i);
            let oracle = table.get(n as usize, i as usize, 0);
            let formula = if (n - 2 * i) >= 0 && (n - 2 * i) % 3 == 0 {
                axis_count(i as u64, ((n - 2 * i) / 3) as u64)
            } else {
                num::BigUint::zero()
            };
            if oracle.is_zero() && closed.is_zero() && formula.is_zero() {
                continue;
            }
            let closed_int = closed.is_integer().then(|| closed.to_integer());
            let agree = closed_int.as_ref().and_then(|c| c.to_biguint()).as_ref() == Some(&oracle)
                && formula == oracle;
            rows.push(AxisRow {
                i,
                n,
                closed: closed.to_string(),
                formula: formula.to_string(),
                oracle: oracle.to_string(),
                agree,
            });
        }
    }
    Ok(rows)
}

/// Every counting check at one order: closed forms against the walk table,
/// the product formulas, the kernel invariants and the functional equations.
pub fn verify_counting(order: usize, max_i: usize) -> Result<Report> {
    if order < 6 {
        return Err(Error::InvalidParams(format!("order must be at least 6, got {order}")));
    }
    let mut rep = Report::new(format!("counting to t^{}", order - 1));
    let table = build_walk_table(order - 1);

    let rows = axis_comparison(order, max_i)?;
    let bad: Vec<_> = rows.iter().filter(|r| !r.agree).collect();
    let detail = match bad.first() {
        None => format!("{} coefficients, i <= {max_i}", rows.len()),
        Some(r) => format!("i={} n={}: closed {} formula {} oracle {}", r.i, r.n, r.closed, r.formula, r.oracle),
    };
    rep.check("Q(x,0) closed form = oracle = product formula", bad.is_empty(), detail);

    let mut first_bad = None;
    for n in 0..=(order - 1) / 3 {
        if crate::walks::kreweras_count(n as u64) != table.get(3 * n, 0, 0) {
            first_bad.get_or_insert(n);
        }
    }
    rep.check(
        "a(3n) = 4^n C(3n,n) / ((n+1)(2n+1))",
        first_bad.is_none(),
        first_bad.map_or(format!("3n < {order}"), |n| format!("first mismatch n={n}")),
    );

    let diag = q_diag_closed(order)?;
    let oracle = q_full_by_recurrence(order).diagonal();
    rep.record("diagonal closed form = oracle", diag.check_eq(&oracle, order as i64, "Q_d"));
    let mut diag_ok = true;
    for n in 0..order {
        for i in 0..=n {
            let c = diag.coeff_xt(n as i64, i as i64);
            diag_ok &= c == Rat::from_integer(table.get(n, i, i).into());
        }
    }
    rep.check("diagonal closed form = walk table", diag_ok, "");

    rep.merge(crate::kernel::kernel_data(&KernelParams::counting(order as i64))?.verify());
    rep.merge(verify_q_xy_closed(order)?);
    rep.merge(verify_kernel_equation_r(order)?);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_expansion() {
        let w = w_series(10).unwrap();
        assert_eq!(w.coeff_xt(1, 0), rat_int(2));
        assert_eq!(w.coeff_xt(4, 0), rat_int(8));
        assert_eq!(w.coeff_xt(7, 0), rat_int(96));
    }

    #[test]
    fn recurrence_examples() {
        let q = q_full_by_recurrence(8);
        assert_eq!(q.coeff(0, 0, 0), rat_int(1));
        assert_eq!(q.coeff(3, 0, 0), rat_int(2));
        assert_eq!(q.coeff(1, 1, 1), rat_int(1));
        assert_eq!(q.diagonal().coeff_xt(3, 0), rat_int(2));
    }

    #[test]
    fn q_x0_examples() {
        let q = q_x0_closed(10).unwrap();
        assert_eq!(q.coeff_xt(0, 0), rat_int(1));
        assert_eq!(q.coeff_xt(3, 0), rat_int(2));
        assert_eq!(q.coeff_xt(2, 1), rat_int(1));
    }

    #[test]
    fn axis_gf_examples() {
        assert_eq!(axis_gf_closed(0, 10).unwrap().coeff_xt(3, 0), rat_int(2));
        assert_eq!(axis_gf_closed(1, 10).unwrap().coeff_xt(2, 0), rat_int(1));
        let a2 = axis_gf_closed(2, 10).unwrap().coeff_xt(4, 0);
        assert_eq!(a2, Rat::from_integer(build_walk_table(4).get(4, 2, 0).into()));
    }

    #[test]
    fn diag_examples() {
        let d = q_diag_closed(10).unwrap();
        assert_eq!(d.coeff_xt(0, 0), rat_int(1));
        assert_eq!(d.coeff_xt(1, 1), rat_int(1));
        assert_eq!(d.coeff_xt(3, 0), rat_int(2));
    }

    #[test]
    fn q_xy_closed_small() {
        let rep = verify_q_xy_closed(10).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures());
    }

    #[test]
    fn r_identities_small() {
        let rep = verify_kernel_equation_r(8).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures());
    }

    #[test]
    fn r_leading_terms() {
        let r = r_series(6).unwrap();
        assert!(r.coeff(0).is_zero());
        assert_eq!(r.coeff_xt(1, 1), rat_int(1));
        assert_eq!(r.coeff_xt(3, 2), rat_int(1));
    }

    #[test]
    fn combined_counting_checks() {
        let rep = verify_counting(12, 4).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures());
    }
}
