//! The kernel `K(x, y) = xy - t(x + y + rho x^2 y^2)`.
//!
//! `rho = 1` is the counting kernel and `rho = pqr` the kernel of the
//! time-dependent law. The root `Y1` of the kernel is not a power series in
//! `t`, so it only ever appears as `e1 - Y0`.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::report::Report;
use crate::series::rat::{fmt_rat, rat_pow};
use crate::series::{rat, rat_int, solve_valuation_fixed_point, Rat, TSeries};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelParams {
    #[serde(serialize_with = "ser_rat")]
    pub rho: Rat,
    pub order: i64,
}

fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rat(r))
}

impl KernelParams {
    pub fn new(rho: Rat, order: i64) -> Result<Self> {
        if rho <= Rat::zero() {
            return Err(Error::InvalidParams(format!("rho must be positive, got {rho}")));
        }
        if order < 4 {
            return Err(Error::InvalidParams(format!("order must be at least 4, got {order}")));
        }
        Ok(KernelParams { rho, order })
    }

    pub fn counting(order: i64) -> Self {
        KernelParams { rho: Rat::one(), order }
    }
}

#[derive(Clone, Debug)]
pub struct KernelData {
    pub params: KernelParams,
    pub y0: TSeries,
    /// `Y0 + Y1 = xbar (1 - t xbar) / (rho t)`.
    pub e1: TSeries,
    /// `Y0 Y1 = xbar / rho`.
    pub e2: TSeries,
    pub delta: TSeries,
    pub z: TSeries,
    pub w: TSeries,
    pub delta0: TSeries,
    pub delta_plus: TSeries,
    pub delta_minus: TSeries,
    pub x2: TSeries,
}

/// `K(x, y)` with `y` a series: `x y - t x - t y - rho t x^2 y^2`.
pub fn kernel_at(rho: &Rat, y: &TSeries) -> TSeries {
    let xy = y.shift_x(1);
    let tx = TSeries::monomial(Rat::one(), 1, 1);
    let ty = y.shift_t(1);
    let quad = (y * y).shift_t(1).shift_x(2).scale(rho);
    &(&(&xy - &tx) - &ty) - &quad
}

/// `Y0 = t (1 + xbar Y0 + rho x Y0^2)`, the kernel root that is a power series in `t`.
pub fn compute_y0(params: &KernelParams) -> Result<TSeries> {
    let rho = params.rho.clone();
    let y0 = solve_valuation_fixed_point(
        |u| {
            let inner = &(&TSeries::one() + &u.shift_x(-1)) + &(u * u).shift_x(1).scale(&rho);
            inner.shift_t(1)
        },
        params.order,
    )?;
    let n = params.order;
    if let Some((lo, hi)) = y0.x_range() {
        assert!(lo >= -n && hi <= n, "x-exponents of Y0 left [-{n}, {n}]");
    }
    Ok(y0)
}

pub fn symmetric_functions(rho: &Rat) -> (TSeries, TSeries) {
    let inv = rho.recip();
    let e1 = &TSeries::monomial(inv.clone(), -1, -1) - &TSeries::monomial(inv.clone(), 0, -2);
    let e2 = TSeries::monomial(inv, 0, -1);
    (e1, e2)
}

/// `Delta(x) = (1 - t xbar)^2 - 4 rho t^2 x`.
pub fn discriminant(rho: &Rat) -> TSeries {
    let a = &TSeries::one() - &TSeries::monomial(Rat::one(), 1, -1);
    &(&a * &a) - &TSeries::monomial(rat_int(4) * rho, 2, 1)
}

/// `Z = 1 + 4 rho t^3 Z^3`.
pub fn z_series(rho: &Rat, order: i64) -> Result<TSeries> {
    let c = rat_int(4) * rho;
    solve_valuation_fixed_point(
        |u| &TSeries::one() + &u.pow(3).shift_t(3).scale(&c),
        order,
    )
}

/// `(Delta0, Delta+, Delta-)` with `Delta = Delta0 Delta+(x) Delta-(xbar)`.
pub fn canonical_factorization(params: &KernelParams) -> Result<(TSeries, TSeries, TSeries)> {
    let z = z_series(&params.rho, params.order)?;
    factors_from_z(&params.rho, &z)
}

fn factors_from_z(rho: &Rat, z: &TSeries) -> Result<(TSeries, TSeries, TSeries)> {
    let z2 = z * z;
    let delta0 = z2.invert()?;
    let delta_plus = &TSeries::one() - &z2.shift_t(2).shift_x(1).scale(&(rat_int(4) * rho));
    let zz = z * &(&TSeries::one() + z);
    let delta_minus =
        &(&TSeries::one() - &zz.shift_t(1).shift_x(-1)) + &z2.shift_t(2).shift_x(-2);
    Ok((delta0, delta_plus, delta_minus))
}

/// `X2 = 1 / (4 rho t^2 Z^2)`, the root of `Delta` that is a Laurent series in `t`.
pub fn x2_series(params: &KernelParams) -> Result<TSeries> {
    let z = z_series(&params.rho, params.order)?;
    x2_from_z(&params.rho, &z)
}

fn x2_from_z(rho: &Rat, z: &TSeries) -> Result<TSeries> {
    Ok((z * z).invert()?.shift_t(-2).scale(&(rat_int(4) * rho).recip()))
}

/// `Delta-` in the form `1 - xbar W (1 + W^3/4) + xbar^2 W^2 / 4`, valid for `rho = 1`.
pub fn delta_minus_w_form(w: &TSeries) -> TSeries {
    let w3 = w.pow(3).scale(&rat(1, 4));
    let lin = (w * &(&TSeries::one() + &w3)).shift_x(-1);
    let quad = (w * w).shift_x(-2).scale(&rat(1, 4));
    &(&TSeries::one() - &lin) + &quad
}

pub fn kernel_data(params: &KernelParams) -> Result<KernelData> {
    let y0 = compute_y0(params)?;
    let (e1, e2) = symmetric_functions(&params.rho);
    let delta = discriminant(&params.rho);
    let z = z_series(&params.rho, params.order)?;
    let w = z.shift_t(1).scale(&rat_int(2));
    let (delta0, delta_plus, delta_minus) = factors_from_z(&params.rho, &z)?;
    let x2 = x2_from_z(&params.rho, &z)?;
    Ok(KernelData {
        params: params.clone(),
        y0,
        e1,
        e2,
        delta,
        z,
        w,
        delta0,
        delta_plus,
        delta_minus,
        x2,
    })
}

impl KernelData {
    /// `Y1 = e1 - Y0`; valuation `-1` in `t`.
    pub fn y1(&self) -> TSeries {
        &self.e1 - &self.y0
    }

    /// `Y0 - Y1 = 2 Y0 - e1`.
    pub fn root_gap(&self) -> TSeries {
        &self.y0.scale(&rat_int(2)) - &self.e1
    }

    /// Checks every kernel invariant; failures are reported, not raised.
    pub fn verify(&self) -> Report {
        let n = self.params.order;
        let rho = &self.params.rho;
        let mut rep = Report::new(format!("kernel rho={}", fmt_rat(rho)));
        let zero = TSeries::zero();
        let y1 = self.y1();

        rep.record("K(x, Y0) = 0", kernel_at(rho, &self.y0).check_eq(&zero, n - 1, "K(x,Y0)"));
        rep.record("K(x, Y1) = 0", kernel_at(rho, &y1).check_eq(&zero, n - 2, "K(x,Y1)"));
        rep.record("Y0 Y1 = e2", (&self.y0 * &y1).check_eq(&self.e2, n - 2, "Y0*Y1"));

        // K(x, y) = -rho t x^2 (y^2 - (Y0+Y1) y + Y0 Y1), coefficientwise in y.
        let lead = TSeries::monomial(-rho.clone(), 1, 2);
        let c1 = (&self.y0 + &y1).shift_t(1).shift_x(2).scale(rho);
        let c0 = (&self.y0 * &y1).shift_t(1).shift_x(2).scale(&-rho.clone());
        let k1 = &TSeries::x() - &TSeries::t();
        let k0 = TSeries::monomial(-Rat::one(), 1, 1);
        let fact = lead.check_eq(&TSeries::monomial(-rho.clone(), 1, 2), n, "[y^2]")
            .and_then(|_| c1.check_eq(&k1, n - 1, "[y^1]"))
            .and_then(|_| c0.check_eq(&k0, n - 1, "[y^0]"));
        rep.record("K = -rho t x^2 (y - Y0)(y - Y1)", fact);

        let gap = self.root_gap();
        let lhs = (&gap * &gap).shift_t(2).shift_x(2).scale(&(rho * rho));
        rep.record("(Y0 - Y1)^2 rho^2 t^2 x^2 = Delta", lhs.check_eq(&self.delta, n, "gap^2"));

        let prod = &(&self.delta0 * &self.delta_plus) * &self.delta_minus;
        rep.record("Delta = Delta0 Delta+ Delta-", prod.check_eq(&self.delta, n, "factorization"));

        let w2 = self.z.shift_t(1).scale(&rat_int(2));
        rep.record("W = 2 t Z", self.w.check_eq(&w2, n, "W"));
        let zfix = &TSeries::one() + &self.z.pow(3).shift_t(3).scale(&(rat_int(4) * rho));
        rep.record("Z = 1 + 4 rho t^3 Z^3", self.z.check_eq(&zfix, n, "Z"));

        let one = (&self.x2 * &(&self.z * &self.z)).shift_t(2).scale(&(rat_int(4) * rho));
        rep.record("4 rho t^2 X2 Z^2 = 1", one.check_eq(&TSeries::one(), n - 2, "X2"));
        rep.record(
            "Delta(X2) = 0",
            self.delta.compose_x(&self.x2).and_then(|d| d.check_eq(&zero, n - 4, "Delta(X2)")),
        );
        rep.record(
            "Delta+(X2) = 0",
            self.delta_plus.compose_x(&self.x2).and_then(|d| d.check_eq(&zero, n - 4, "Delta+(X2)")),
        );

        if rho.is_one() {
            let wf = delta_minus_w_form(&self.w);
            rep.record("Delta- Z form = W form", self.delta_minus.check_eq(&wf, n, "Delta-"));
            let wsq = &self.w * &self.w;
            let xw = (&self.x2 * &wsq).check_eq(&TSeries::one(), n - 2, "X2 W^2");
            rep.record("X2 W^2 = 1", xw);
        }

        rep.merge(verify_orbit_invariance(&self.params));
        rep
    }
}

/// Laurent polynomial in `(t, x, y)`, keyed by exponents.
pub type Tri = BTreeMap<(i64, i64, i64), Rat>;

fn tri_add(p: &mut Tri, key: (i64, i64, i64), c: Rat) {
    let e = p.entry(key).or_insert_with(Rat::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&key);
    }
}

/// `1 - t (xbar + ybar + rho x y)`.
pub fn rational_kernel(rho: &Rat) -> Tri {
    let mut k = Tri::new();
    tri_add(&mut k, (0, 0, 0), Rat::one());
    tri_add(&mut k, (1, -1, 0), -Rat::one());
    tri_add(&mut k, (1, 0, -1), -Rat::one());
    tri_add(&mut k, (1, 1, 1), -rho.clone());
    k
}

/// Monomial substitution `x -> a x^i y^j`, `y -> b x^k y^l`.
#[derive(Clone, Debug)]
pub struct MonoMap {
    pub a: Rat,
    pub xe: (i64, i64),
    pub b: Rat,
    pub ye: (i64, i64),
}

impl MonoMap {
    /// `(x, y) -> (xbar ybar / rho, y)`.
    pub fn phi(rho: &Rat) -> Self {
        MonoMap { a: rho.recip(), xe: (-1, -1), b: Rat::one(), ye: (0, 1) }
    }

    /// `(x, y) -> (x, xbar ybar / rho)`.
    pub fn psi(rho: &Rat) -> Self {
        MonoMap { a: Rat::one(), xe: (1, 0), b: rho.recip(), ye: (-1, -1) }
    }

    pub fn apply(&self, p: &Tri) -> Tri {
        let mut out = Tri::new();
        for (&(n, i, j), c) in p {
            let c = c * rat_pow(&self.a, i) * rat_pow(&self.b, j);
            let key = (n, i * self.xe.0 + j * self.ye.0, i * self.xe.1 + j * self.ye.1);
            tri_add(&mut out, key, c);
        }
        out
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &MonoMap) -> MonoMap {
        let x = other.apply(&mono(self.a.clone(), self.xe));
        let y = other.apply(&mono(self.b.clone(), self.ye));
        let (xe, a) = single(&x);
        let (ye, b) = single(&y);
        MonoMap { a, xe, b, ye }
    }
}

fn mono(c: Rat, e: (i64, i64)) -> Tri {
    let mut m = Tri::new();
    tri_add(&mut m, (0, e.0, e.1), c);
    m
}

fn single(p: &Tri) -> ((i64, i64), Rat) {
    let (&(_, i, j), c) = p.iter().next().expect("monomial image");
    ((i, j), c.clone())
}

pub fn verify_orbit_invariance(params: &KernelParams) -> Report {
    let rho = &params.rho;
    let mut rep = Report::new("orbit");
    let k = rational_kernel(rho);
    let phi = MonoMap::phi(rho);
    let psi = MonoMap::psi(rho);
    rep.check("K(x,y) = K(phi(x,y))", phi.apply(&k) == k, "x -> xbar ybar / rho");
    rep.check("K(x,y) = K(psi(x,y))", psi.apply(&k) == k, "y -> xbar ybar / rho");
    let id = |m: &MonoMap| m.a.is_one() && m.b.is_one() && m.xe == (1, 0) && m.ye == (0, 1);
    rep.check("phi o phi = id", id(&phi.then(&phi)), "involution");
    rep.check("psi o psi = id", id(&psi.then(&psi)), "involution");
    // The orbit has order 6: (phi psi)^3 = id.
    let pp = phi.then(&psi);
    let cube = pp.then(&pp).then(&pp);
    rep.check("(phi psi)^3 = id", id(&cube) && !id(&pp), "orbit of size 6");
    rep.check("K(phi psi (x,y)) = K", pp.apply(&k) == k, "composed pair");
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::LPoly;

    fn lp(terms: &[(i64, i64)]) -> LPoly {
        LPoly::from_terms(terms.iter().map(|&(e, c)| (e, rat_int(c))))
    }

    #[test]
    fn y0_leading_terms() {
        let y0 = compute_y0(&KernelParams::counting(10)).unwrap();
        assert_eq!(y0.coeff(0), LPoly::zero());
        assert_eq!(y0.coeff(1), lp(&[(0, 1)]));
        assert_eq!(y0.coeff(2), lp(&[(-1, 1)]));
        assert_eq!(y0.coeff(3), lp(&[(-2, 1), (1, 1)]));
    }

    #[test]
    fn y0_law_kernel_starts_the_same() {
        let p = KernelParams::new(rat(1, 27), 8).unwrap();
        let y0 = compute_y0(&p).unwrap();
        assert_eq!(y0.coeff(1), lp(&[(0, 1)]));
        assert_eq!(y0.coeff(2), lp(&[(-1, 1)]));
        assert_eq!(y0.coeff_xt(3, 1), rat(1, 27));
    }

    #[test]
    fn z_and_w_expansions() {
        let z = z_series(&Rat::one(), 10).unwrap();
        assert_eq!(z.coeff_xt(0, 0), rat_int(1));
        assert_eq!(z.coeff_xt(3, 0), rat_int(4));
        assert_eq!(z.coeff_xt(6, 0), rat_int(48));
        let w = z.shift_t(1).scale(&rat_int(2));
        assert_eq!(w.coeff_xt(1, 0), rat_int(2));
        assert_eq!(w.coeff_xt(4, 0), rat_int(8));
        assert_eq!(w.coeff_xt(7, 0), rat_int(96));
    }

    #[test]
    fn x2_expansion() {
        let x2 = x2_series(&KernelParams::counting(14)).unwrap();
        assert_eq!(x2.valuation(), -2);
        assert_eq!(x2.coeff_xt(-2, 0), rat(1, 4));
        assert_eq!(x2.coeff_xt(-1, 0), rat_int(0));
        assert_eq!(x2.coeff_xt(1, 0), rat_int(-2));
        assert_eq!(x2.coeff_xt(4, 0), rat_int(-12));
        assert_eq!(x2.coeff_xt(7, 0), rat_int(-160));
        assert_eq!(x2.coeff_xt(10, 0), rat_int(-2688));
    }

    #[test]
    fn counting_kernel_invariants() {
        let data = kernel_data(&KernelParams::counting(14)).unwrap();
        let rep = data.verify();
        assert!(rep.passed(), "{:?}", rep.failures());
    }

    #[test]
    fn law_kernel_invariants() {
        let rho = rat(1, 3) * rat(1, 2) * rat(1, 6);
        let data = kernel_data(&KernelParams::new(rho, 12).unwrap()).unwrap();
        let rep = data.verify();
        assert!(rep.passed(), "{:?}", rep.failures());
    }

    #[test]
    fn orbit_breaks_for_wrong_rho() {
        let k = rational_kernel(&rat(1, 36));
        assert_ne!(MonoMap::phi(&rat(1, 27)).apply(&k), k);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(KernelParams::new(rat_int(0), 10).is_err());
        assert!(KernelParams::new(rat_int(1), 2).is_err());
    }
}
