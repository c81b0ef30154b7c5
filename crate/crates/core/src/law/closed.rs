//! Closed forms for `P00`, `S(x,0)` and `D(x,0)` as exact truncated series.

use num::bigint::BigInt;
use num::{One, Zero};

use super::ChainParams;
use crate::error::{Error, Result};
use crate::kernel::{discriminant, z_series};
use crate::series::{geometric, rat, rat_int, LPoly, Rat, TSeries, XPart};

/// Extra coefficients carried through divisions by series of positive valuation.
const PAD: i64 = 4;

/// Which denominator the leading term `(1 - 2 xbar t)/(k t)` of the `B`
/// decomposition uses: `k = pq`, or `k = pqr`, the constant of the `t^-1`
/// term of `B`. Only `k = pq` is consistent with the law; the other is kept
/// to show that it is not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum CminusConvention {
    AsPrinted,
    WithR,
}

fn c(v: Rat) -> TSeries {
    TSeries::constant(v)
}

fn mono(v: Rat, t: i64, x: i64) -> TSeries {
    TSeries::monomial(v, t, x)
}

/// `a / b` for `b` whose leading `t`-coefficient is a nonzero constant.
fn div_series(a: &TSeries, b: &TSeries) -> Result<TSeries> {
    if b.is_zero() {
        return Err(Error::NotInvertible("division by a zero series".into()));
    }
    let v = b.valuation();
    Ok((a * &b.shift_t(-v).invert()?).shift_t(-v))
}

/// Solves `den * u = num` one `t`-layer at a time. The lowest layer of the
/// exact divisor must be a monomial `c x^k`; the quotient must come out as
/// a power series in `x`, otherwise the division leaves a remainder.
pub fn divide_layered(num: &TSeries, den: &TSeries) -> Result<TSeries> {
    if !den.is_exact() || den.is_zero() {
        return Err(Error::InexactDivision("divisor must be a nonzero polynomial in t".into()));
    }
    let vd = den.valuation();
    let (lead, k) = den
        .coeff(vd)
        .as_monomial()
        .ok_or_else(|| Error::InexactDivision(format!("lowest layer {} is not a monomial", den.coeff(vd))))?;
    let top = den.iter().map(|(n, _)| n).max().unwrap_or(vd);
    let layers: Vec<LPoly> = (vd..=top).map(|n| den.coeff(n)).collect();
    let vu = if num.is_zero() { num.prec() - vd } else { num.valuation() - vd };
    let pu = num.prec() - vd;
    let inv = lead.recip();
    let mut u: Vec<LPoly> = Vec::new();
    for m in vu..pu {
        let mut r = num.coeff(m + vd);
        for (j, dj) in layers.iter().enumerate().skip(1) {
            let idx = m - j as i64 - vu;
            if idx < 0 {
                break;
            }
            let prod = dj * &u[idx as usize];
            r = &r - &prod;
        }
        let q = r.shift(-k).scale(&inv);
        if let Some(e) = q.min_exp().filter(|e| *e < 0) {
            return Err(Error::InexactDivision(format!(
                "remainder at t^{m}: quotient has x^{e} (layer {q})"
            )));
        }
        u.push(q);
    }
    Ok(TSeries::new(vu, u, pu))
}

fn rho(params: &ChainParams) -> Rat {
    params.rho()
}

/// `Delta-(a/t) = 1 - a Z (1 + Z) + a^2 Z^2`.
fn delta_minus_at(a: &Rat, z: &TSeries) -> TSeries {
    let one = TSeries::one();
    let zz = (z * &(&one + z)).scale(a);
    &(&one - &zz) + &(z * z).scale(&(a * a))
}

/// `A_{a,b} = (a(1-2a) - b r t^3) sqrt(Delta-(a/t)) / ((1-t^3)(1-2aZ))`.
fn a_series(a: &Rat, b: &Rat, r: &Rat, z: &TSeries, prec: i64) -> Result<TSeries> {
    let lead = a * (Rat::one() - rat_int(2) * a);
    let num = &c(lead) - &mono(b * r, 3, 0);
    let sq = delta_minus_at(a, z).sqrt()?;
    let den = &TSeries::one() - &z.scale(&(rat_int(2) * a));
    let top = &(&num * &sq) * &geometric(3, prec);
    div_series(&top, &den)
}

/// `P00` from `2pq P00 + r(1-r) = A_{p,q} + A_{q,p}`, known below `t^prec`.
pub fn p00_closed_general(params: &ChainParams, prec: i64) -> Result<TSeries> {
    let m = prec + PAD;
    let (p, q, r) = (&params.p, &params.q, &params.r);
    let z = z_series(&rho(params), m)?;
    let sum = &a_series(p, q, r, &z, m)? + &a_series(q, p, r, &z, m)?;
    let shifted = &sum - &c(r * (Rat::one() - r));
    Ok(shifted.scale(&(rat_int(2) * p * q).recip()).truncate(prec))
}

fn require_symmetric(params: &ChainParams) -> Result<()> {
    if params.p != params.q {
        return Err(Error::InvalidParams(format!("symmetric forms need p = q, got {}", params.label())));
    }
    Ok(())
}

/// `P00 = (r/p)(sqrt(Delta-(p/t))/(1 - 2pZ) - 1)` for `p = q`.
pub fn p00_symmetric(params: &ChainParams, prec: i64) -> Result<TSeries> {
    require_symmetric(params)?;
    let m = prec + PAD;
    let (p, r) = (&params.p, &params.r);
    let z = z_series(&rho(params), m)?;
    let den = &TSeries::one() - &z.scale(&(rat_int(2) * p));
    let ratio = div_series(&delta_minus_at(p, &z).sqrt()?, &den)?;
    Ok((&ratio - &TSeries::one()).scale(&(r / p)).truncate(prec))
}

/// `Q(px, 0)` for `p = q`, from
/// `(t - x(1-p) + p r x^2 t^2) Q(px,0) = r/(2p) ((2tZ - x) sqrt(Delta-(p/t)) sqrt(Delta+(x)) / (Z(1-2pZ)) - 2t + x(1-p))`.
pub fn qpx0_symmetric(params: &ChainParams, prec: i64) -> Result<TSeries> {
    require_symmetric(params)?;
    let m = prec + PAD;
    let (p, r) = (&params.p, &params.r);
    let one = Rat::one();
    let z = z_series(&rho(params), m)?;
    let dplus = delta_plus(&rho(params), &z)?;
    let den = &z * &(&TSeries::one() - &z.scale(&(rat_int(2) * p)));
    let lin = &z.shift_t(1).scale(&rat_int(2)) - &TSeries::x();
    let top = &(&lin * &delta_minus_at(p, &z).sqrt()?) * &dplus;
    let frac = div_series(&top, &den)?;
    let rest = &mono(rat_int(-2), 1, 0) + &mono(&one - p, 0, 1);
    let rhs = (&frac + &rest).scale(&(r / (rat_int(2) * p)));
    let lhs = TSeries::poly(&[(1, 0, one.clone()), (0, 1, p - &one), (2, 2, p * r)]);
    Ok(divide_layered(&rhs, &lhs)?.truncate(prec))
}

/// `sqrt(1 - 4 rho t^2 Z^2 x)`.
fn delta_plus(rho: &Rat, z: &TSeries) -> Result<TSeries> {
    let d = &TSeries::one() - &(z * z).shift_t(2).shift_x(1).scale(&(rat_int(4) * rho));
    d.sqrt()
}

/// `F_{a,b}(x) = (t - x b)(t - (1-b) x + t^2 a r x^2)`.
fn f_poly(a: &Rat, b: &Rat, r: &Rat) -> TSeries {
    let one = Rat::one();
    let first = TSeries::poly(&[(1, 0, one.clone()), (0, 1, -b.clone())]);
    let second = TSeries::poly(&[(1, 0, one.clone()), (0, 1, b - &one), (2, 2, a * r)]);
    &first * &second
}

/// `(t - (1-p)x + t^2 q r x^2)(t - (1-q)x + t^2 p r x^2)`.
fn quartic(params: &ChainParams) -> TSeries {
    let (p, q, r) = (&params.p, &params.q, &params.r);
    let one = Rat::one();
    let a = TSeries::poly(&[(1, 0, one.clone()), (0, 1, p - &one), (2, 2, q * r)]);
    let b = TSeries::poly(&[(1, 0, one.clone()), (0, 1, q - &one), (2, 2, p * r)]);
    &a * &b
}

fn h_poly(params: &ChainParams) -> TSeries {
    let (p, q, r) = (&params.p, &params.q, &params.r);
    let one = Rat::one();
    let two = rat_int(2);
    let fpq = f_poly(p, q, r);
    let fqp = f_poly(q, p, r);
    let gp = TSeries::poly(&[(1, 0, two.clone()), (0, 1, p - &one)]);
    let gq = TSeries::poly(&[(1, 0, two.clone()), (0, 1, q - &one)]);
    let tail = TSeries::poly(&[
        (1, 2, &two * r),
        (0, 3, -((&one - p) * (&one - q))),
        (2, 4, &two * p * q * r),
    ]);
    let d2 = (p - q) * (p - q);
    &(&(&gp * &fpq).scale(q) + &(&gq * &fqp).scale(p)) - &tail.scale(&d2)
}

/// `S(x,0)` from
/// `Pq(x) S(x,0)/t + r H(x)/(2pq) = (2tZ - x) sqrt(Delta+(x)) / (2pqZ) (A_{p,q} F_{p,q} + A_{q,p} F_{q,p})`.
pub fn s_x0_closed(params: &ChainParams, prec: i64) -> Result<TSeries> {
    let m = prec + PAD;
    let (p, q, r) = (&params.p, &params.q, &params.r);
    let rh = rho(params);
    let z = z_series(&rh, m)?;
    let apq = a_series(p, q, r, &z, m)?;
    let aqp = a_series(q, p, r, &z, m)?;
    let mix = &(&apq * &f_poly(p, q, r)) + &(&aqp * &f_poly(q, p, r));
    let lin = &z.shift_t(1).scale(&rat_int(2)) - &TSeries::x();
    let two_pq = rat_int(2) * p * q;
    let front = div_series(&(&lin * &delta_plus(&rh, &z)?), &z.scale(&two_pq))?;
    let num = &(&front * &mix) - &h_poly(params).scale(&(r / &two_pq));
    let u = divide_layered(&num, &quartic(params))?;
    Ok(u.shift_t(1).truncate(prec))
}

/// `B(x) = sqrt(Delta(x)) (1 - 2 t xbar - pqr t x^2) / (pqr t)`, known below `t^prec`.
pub fn b_series(params: &ChainParams, prec: i64) -> Result<TSeries> {
    let rh = rho(params);
    let sq = discriminant(&rh).truncate(prec + 1).sqrt()?;
    let one = Rat::one();
    let factor = TSeries::poly(&[(0, 0, one.clone()), (1, -1, rat_int(-2)), (1, 2, -rh.clone())]);
    Ok((&sq * &factor).scale(&rh.recip()).shift_t(-1).truncate(prec))
}

fn factorial(n: i64) -> BigInt {
    (1..=n.max(1)).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// `C+(x) = sum_{n>=2} t^n sum_k x^(3k-n+2) (pqr)^k (3k-n+1)(3k-n)(n-2)! / (k!(k+1)!(n-2k)!)`,
/// `ceil((n-1)/3) <= k <= floor(n/2)`.
pub fn cplus_lagrange(params: &ChainParams, prec: i64) -> TSeries {
    let rh = rho(params);
    let mut coeffs = vec![LPoly::zero(); prec.max(0) as usize];
    for n in 2..prec {
        let k_lo = (n - 1 + 2).div_euclid(3);
        for k in k_lo..=n / 2 {
            let num = BigInt::from((3 * k - n + 1) * (3 * k - n)) * factorial(n - 2);
            let den = factorial(k) * factorial(k + 1) * factorial(n - 2 * k);
            let v = Rat::new(num, den) * crate::series::rat::rat_pow(&rh, k);
            coeffs[n as usize].add_term(3 * k - n + 2, v);
        }
    }
    TSeries::new(0, coeffs, prec)
}

/// `B = (1 - 2 xbar t)/(k t) + 2 C-(xbar) - x t - x^2 + 2 C+(x)` with its
/// evaluations `C-(p/t)`, `C-(q/t)`.
#[derive(Clone, Debug)]
pub struct BcDecomposition {
    pub convention: CminusConvention,
    pub b: TSeries,
    pub cplus: TSeries,
    pub cminus: TSeries,
    pub cminus_p: TSeries,
    pub cminus_q: TSeries,
}

fn kappa(params: &ChainParams, conv: CminusConvention) -> Rat {
    match conv {
        CminusConvention::AsPrinted => &params.p * &params.q,
        CminusConvention::WithR => params.rho(),
    }
}

/// `C-(a/t)` through `B(t/a) = sqrt((1-a)^2 - 4 (pqr/a) t^3) (1 - 2a - pqr t^3/a^2) / (pqr t)`.
fn cminus_at(params: &ChainParams, a: &Rat, cplus: &TSeries, conv: CminusConvention, prec: i64) -> Result<TSeries> {
    let rh = rho(params);
    let one = Rat::one();
    let two = rat_int(2);
    let base = &c((&one - a) * (&one - a)) - &mono(rat_int(4) * &rh / a, 3, 0);
    let sq = base.truncate(prec + 1).sqrt()?;
    let factor = &c(&one - &two * a) - &mono(&rh / (a * a), 3, 0);
    let bt = (&sq * &factor).scale(&rh.recip()).shift_t(-1);
    let lead = mono((&one - &two * a) / kappa(params, conv), -1, 0);
    let quad = &mono(a.recip(), 2, 0) + &mono((a * a).recip(), 2, 0);
    let cp = cplus.substitute_monomial(&a.recip(), 1)?;
    let sum = &(&(&bt - &lead) + &quad) - &cp.scale(&two);
    Ok(sum.scale(&rat(1, 2)).truncate(prec))
}

/// Splits `B` into its parts; the two routes to `C+` must agree.
pub fn b_decomposition(params: &ChainParams, prec: i64, conv: CminusConvention) -> Result<BcDecomposition> {
    let b = b_series(params, prec)?;
    let half = rat(1, 2);
    let xt_x2 = TSeries::poly(&[(1, 1, Rat::one()), (0, 2, Rat::one())]);
    let cplus = (&b.x_part(XPart::Positive) + &xt_x2).scale(&half);
    if let Some((lo, _)) = cplus.x_range().filter(|(lo, _)| *lo < 3) {
        return Err(Error::IdentityFailed(format!("C+ has a term in x^{lo}")));
    }
    let lagrange = cplus_lagrange(params, cplus.prec());
    cplus.check_eq(&lagrange, cplus.prec(), "C+ by extraction vs Lagrange expansion")?;
    let lead = &mono(kappa(params, conv).recip(), -1, 0) - &mono(rat_int(2) / kappa(params, conv), 0, -1);
    let cminus = (&b.x_part(XPart::NonPositive) - &lead).scale(&half);
    let cminus_p = cminus_at(params, &params.p, &cplus, conv, prec)?;
    let cminus_q = cminus_at(params, &params.q, &cplus, conv, prec)?;
    Ok(BcDecomposition { convention: conv, b, cplus, cminus, cminus_p, cminus_q })
}

impl BcDecomposition {
    /// Right-hand side of the decomposition, to compare with `B`.
    pub fn reassemble(&self, params: &ChainParams) -> TSeries {
        let k = kappa(params, self.convention);
        let lead = &mono(k.recip(), -1, 0) - &mono(rat_int(2) / &k, 0, -1);
        let xt_x2 = TSeries::poly(&[(1, 1, Rat::one()), (0, 2, Rat::one())]);
        let two = rat_int(2);
        &(&(&lead + &self.cminus.scale(&two)) - &xt_x2) + &self.cplus.scale(&two)
    }

    /// `E2 = t^2 r / (1-t^3) (q C-(q/t) - p C-(p/t))`.
    pub fn e2(&self, params: &ChainParams) -> TSeries {
        let (p, q, r) = (&params.p, &params.q, &params.r);
        let diff = &self.cminus_q.scale(q) - &self.cminus_p.scale(p);
        (&diff * &geometric(3, self.cminus_p.prec() + 2)).shift_t(2).scale(r)
    }

    /// `E4 = r^2/(1-t^3) (q(1-q-pt^3) C-(q/t) - p(1-p-qt^3) C-(p/t)) - r(p-q)(2r+1)/(2t)`.
    pub fn e4(&self, params: &ChainParams) -> TSeries {
        let (p, q, r) = (&params.p, &params.q, &params.r);
        let one = Rat::one();
        let wq = TSeries::poly(&[(0, 0, q * (&one - q)), (3, 0, -(q * p))]);
        let wp = TSeries::poly(&[(0, 0, p * (&one - p)), (3, 0, -(p * q))]);
        let diff = &(&wq * &self.cminus_q) - &(&wp * &self.cminus_p);
        let main = (&diff * &geometric(3, self.cminus_p.prec() + 2)).scale(&(r * r));
        let tail = mono(r * (p - q) * (rat_int(2) * r + &one) / rat_int(2), -1, 0);
        &main - &tail
    }
}

/// `D(x,0)` from
/// `Pq(x) D(x,0)/(r x t) + x(p-q)(t^2(1-r) r x^2 - x/2 + t)
///  = r x (p-q) t^2 C+(x) - t/(1-t^3) (p C-(p/t) F_{p,q}(x) - q C-(q/t) F_{q,p}(x))`;
/// zero when `p = q`.
pub fn d_x0_closed(params: &ChainParams, prec: i64, conv: CminusConvention) -> Result<TSeries> {
    if params.p == params.q {
        return Ok(TSeries::zero_to(prec));
    }
    let m = prec + PAD;
    let (p, q, r) = (&params.p, &params.q, &params.r);
    let bc = b_decomposition(params, m, conv)?;
    let d = p - q;
    let one = Rat::one();
    let t1 = bc.cplus.shift_x(1).shift_t(2).scale(&(r * &d));
    let mix = &(&bc.cminus_p * &f_poly(p, q, r)).scale(p) - &(&bc.cminus_q * &f_poly(q, p, r)).scale(q);
    let t2 = (&mix * &geometric(3, m + 2)).shift_t(1);
    let t3 = TSeries::poly(&[(2, 3, (&one - r) * r), (0, 2, rat(-1, 2)), (1, 1, one.clone())]).scale(&d);
    let num = &(&t1 - &t2) - &t3;
    let u = divide_layered(&num, &quartic(params))?;
    Ok(u.shift_x(1).shift_t(1).scale(r).truncate(prec))
}

/// `T(t/p)`, `T(t/q)` and `T(W)` in closed form, with `W = 2tZ`.
#[derive(Clone, Debug)]
pub struct BoundaryValues {
    pub t_tp: TSeries,
    pub t_tq: TSeries,
    pub t_w: TSeries,
    pub w: TSeries,
}

fn t_at(a: &Rat, b: &Rat, r: &Rat, prec: i64) -> Result<TSeries> {
    let one = Rat::one();
    let base = &c((&one - a) * (&one - a)) - &mono(rat_int(4) * b * r, 3, 0);
    let sq = base.truncate(prec).sqrt()?;
    let inner = &c(b - r) + &sq;
    let scale = (a - b) / (rat_int(2) * a * a * b);
    Ok((&inner * &geometric(3, prec)).shift_t(3).scale(&scale).truncate(prec))
}

pub fn boundary_values_t(params: &ChainParams, prec: i64) -> Result<BoundaryValues> {
    let (p, q, r) = (&params.p, &params.q, &params.r);
    let z = z_series(&rho(params), prec)?;
    let w = z.shift_t(1).scale(&rat_int(2));
    let t_w = (&w * &w).shift_t(1).scale(r).truncate(prec);
    Ok(BoundaryValues { t_tp: t_at(p, q, r, prec)?, t_tq: t_at(q, p, r, prec)?, t_w, w })
}

/// `[x^3] B = 4 sum_k t^(3k+2) (pqr)^(k+1) (3k)! / (k!(k+1)!(k+2)!)`.
pub fn b_x3_formula(params: &ChainParams, prec: i64) -> TSeries {
    let rh = rho(params);
    let mut coeffs = vec![Rat::zero(); prec.max(0) as usize];
    let mut k = 0;
    while 3 * k + 2 < prec {
        let v = Rat::new(
            factorial(3 * k) * BigInt::from(4),
            factorial(k) * factorial(k + 1) * factorial(k + 2),
        ) * crate::series::rat::rat_pow(&rh, k + 1);
        coeffs[(3 * k + 2) as usize] = v;
        k += 1;
    }
    TSeries::from_rat_coeffs(0, coeffs, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(p: (i64, i64), q: (i64, i64), r: (i64, i64)) -> ChainParams {
        ChainParams::new(rat(p.0, p.1), rat(q.0, q.1), rat(r.0, r.1)).unwrap()
    }

    #[test]
    fn layered_division_roundtrip() {
        let den = TSeries::poly(&[(0, 1, rat_int(2)), (1, 0, rat_int(1)), (2, 3, rat_int(-1))]);
        let u = TSeries::poly(&[(0, 0, rat_int(1)), (1, 2, rat_int(3)), (3, 1, rat(1, 2))]).truncate(8);
        let num = &den * &u;
        let back = divide_layered(&num, &den).unwrap();
        assert!(back.first_difference(&u, 8).is_none());
        let bad = &num + &TSeries::monomial(rat_int(1), 2, 0).truncate(8);
        assert!(matches!(divide_layered(&bad, &den), Err(Error::InexactDivision(_))));
    }

    #[test]
    fn p00_starts_at_one() {
        let c = chain((1, 3), (1, 2), (1, 6));
        let s = p00_closed_general(&c, 8).unwrap();
        assert_eq!(s.coeff_xt(0, 0), Rat::one());
        assert_eq!(s.coeff_xt(3, 0), &c.p * c.q_second() + &c.q * c.p_prime());
    }

    #[test]
    fn b_low_coefficients() {
        let ch = chain((1, 3), (1, 2), (1, 6));
        let b = b_series(&ch, 12).unwrap();
        assert!(b.x_coeff(1).first_difference(&mono(rat_int(-1), 1, 0), 12).is_none());
        assert!(b.x_coeff(2).first_difference(&c(rat_int(-1)), 12).is_none());
        assert!(b.x_coeff(3).first_difference(&b_x3_formula(&ch, 12), 12).is_none());
    }
}
