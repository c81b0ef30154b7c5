//! One function per subcommand; each returns a rendered-ready [`Outcome`].

use kreweras::counting::verify_counting;
use kreweras::kernel::{kernel_data, KernelParams};
use kreweras::law::{self, ChainParams};
use kreweras::report::Report;
use kreweras::series::{fmt_rat, rat, TSeries};
use kreweras::stationary::{self as st, ClosedForm};
use kreweras::walks::build_walk_table;
use kreweras::{Error, Result};
use serde_json::{json, Value};

use crate::output::{Outcome, SCHEMA};

/// Extra kernel parameters checked beside `rho = 1`.
const RHOS: [(i64, i64); 3] = [(2, 9), (5, 7), (3, 2)];

/// Stationary power iteration stops once the L1 change is below this.
const ITER_TOL: f64 = 1e-12;
const MAX_ITER: usize = 1_000_000;

fn params_json(c: &ChainParams) -> Value {
    json!({ "p": fmt_rat(&c.p), "q": fmt_rat(&c.q), "r": fmt_rat(&c.r), "ergodic": c.is_ergodic() })
}

fn chain(p: (i64, i64), q: (i64, i64), r: (i64, i64)) -> ChainParams {
    ChainParams::new(rat(p.0, p.1), rat(q.0, q.1), rat(r.0, r.1)).expect("valid chain")
}

/// One triple per tail regime: `p < q`, `p = q`, `p > q`.
pub fn default_regimes() -> Vec<ChainParams> {
    vec![chain((1, 3), (1, 2), (1, 6)), chain((2, 5), (2, 5), (1, 5)), chain((1, 2), (1, 3), (1, 6))]
}

fn need_order(order: usize, min: usize) -> Result<()> {
    if order < min {
        return Err(Error::InvalidParams(format!("order must be at least {min}, got {order}")));
    }
    Ok(())
}

pub fn count(order: usize, max_i: usize) -> Result<Outcome> {
    let table = build_walk_table(order);
    let mut lengths = Vec::new();
    let mut text = String::from("n  total  excursions\n");
    for n in 0..=order {
        let total = table.total(n).to_string();
        let exc = table.get(n, 0, 0).to_string();
        text.push_str(&format!("{n}  {total}  {exc}\n"));
        lengths.push(json!({ "n": n, "total": total, "excursions": exc }));
    }
    let mut axis = Vec::new();
    for n in 0..=order {
        for (i, _, c) in table.entries(n).filter(|&(i, j, _)| j == 0 && i <= max_i) {
            axis.push(json!({ "n": n, "i": i, "count": c.to_string() }));
        }
    }
    let json = json!({
        "schema": SCHEMA,
        "command": "count",
        "order": order,
        "lengths": lengths,
        "axis": axis,
    });
    Ok(Outcome { json, csv: table.to_csv(0, order), text, passed: true })
}

pub fn verify_count_reports(order: usize, max_i: usize) -> Result<Vec<Report>> {
    need_order(order, 5)?;
    let mut reports = vec![verify_counting(order + 1, max_i)?];
    for (a, b) in RHOS {
        let kp = KernelParams::new(rat(a, b), order as i64 + 1)?;
        reports.push(kernel_data(&kp)?.verify());
    }
    Ok(reports)
}

pub fn verify_count(order: usize, max_i: usize) -> Result<Outcome> {
    let reports = verify_count_reports(order, max_i)?;
    Ok(Outcome::from_reports("verify-count", &reports, json!({ "order": order, "max_i": max_i })))
}

pub fn stationary(params: &ChainParams, prec: usize, max_i: usize, tail: usize) -> Result<Outcome> {
    let cf = ClosedForm::new(params, prec)?;
    let pi0 = cf.pi0(max_i);
    let (grid, _) = cf.grid(max_i);
    let residual = st::stationarity_residual(params, &grid, prec).to_f64();
    let fit = st::asymptotics_fit(params, prec, tail)?;
    let digits = 30;
    let pi0s: Vec<String> = pi0.iter().map(|v| v.to_sci(digits)).collect();
    let json = json!({
        "schema": SCHEMA,
        "command": "stationary",
        "params": params_json(params),
        "prec": prec,
        "w": cf.w.to_sci(digits),
        "p00": cf.p00.to_sci(digits),
        "pi0": pi0s,
        "residual": residual,
        "asymptotics": {
            "fit": fit,
            "rate_ok": fit.rate_ok(),
            "exponent_ok": fit.exponent_ok(),
        },
    });
    let mut csv = String::from("i,p_i0\n");
    let mut text = format!("{}\nw   = {}\np00 = {}\n", params.label(), cf.w.to_sci(digits), cf.p00.to_sci(digits));
    for (i, v) in pi0s.iter().enumerate() {
        csv.push_str(&format!("{i},{v}\n"));
        text.push_str(&format!("p_{{{i},0}} = {v}\n"));
    }
    text.push_str(&format!("stationarity residual (i, j <= {max_i}) = {residual:.3e}\n"));
    text.push_str(&format!(
        "tail fit over [{}, {}] ({}): rate {:.6} (expected {:.6}), exponent {:.4} (expected {:.4})\n",
        fit.i_lo, fit.i_hi, fit.regime, fit.rate, fit.expected_rate, fit.exponent, fit.expected_exponent
    ));
    Ok(Outcome { json, csv, text, passed: true })
}

pub fn verify_stationary_reports(
    params: &ChainParams,
    prec: usize,
    grid: usize,
    tol: f64,
    max_i: usize,
) -> Result<Vec<Report>> {
    params.require_ergodic()?;
    if max_i + 2 > grid {
        return Err(Error::InvalidParams(format!("max-i {max_i} does not fit in grid {grid}")));
    }
    let est = st::stationary_numeric(params, grid, ITER_TOL, MAX_ITER)?;
    let mut numeric = st::compare_with_numeric(params, prec, &est, max_i, tol)?;
    let dm = (est.mass - 1.0).abs();
    numeric.check("power iteration is normalized", dm <= tol, format!("|mass - 1| = {dm:.3e}"));
    numeric.check(
        "power iteration converged",
        est.residual < ITER_TOL,
        format!("{} iterations, residual {:.3e}, lost {:.3e}", est.iterations, est.residual, est.lost),
    );
    let mut reports = vec![
        numeric,
        st::verify_balance_identities(params, prec, Some(&est), tol)?,
        st::verify_root_identities(params, prec, 1e-25)?,
    ];
    if params.p == params.q {
        reports.push(st::verify_limit_route(params, prec)?);
    } else {
        let lower = if params.p < params.q { params.clone() } else { params.swapped() };
        reports.push(st::factored_forms(&lower, prec, 20, 1e-12)?);
        reports.push(st::asymmetry_witness(params, prec, 20, 1e-30)?);
    }
    Ok(reports)
}

pub fn verify_stationary(params: &ChainParams, prec: usize, grid: usize, tol: f64, max_i: usize) -> Result<Outcome> {
    let reports = verify_stationary_reports(params, prec, grid, tol, max_i)?;
    let extra = json!({ "params": params_json(params), "grid": grid, "prec": prec, "tol": tol });
    Ok(Outcome::from_reports("verify-stationary", &reports, extra))
}

fn series_coeffs(s: &TSeries, below: i64) -> Vec<String> {
    (0..below).map(|n| fmt_rat(&s.coeff_xt(n, 0))).collect()
}

pub fn law(params: &ChainParams, order: usize) -> Result<Outcome> {
    need_order(order, 1)?;
    let table = law::law_dp(params, order);
    let p00 = law::p00_closed_general(params, order as i64 + 1)?;
    let oracle = table.p00_series();
    let agree = (0..=order as i64).all(|n| p00.coeff_xt(n, 0) == oracle.coeff_xt(n, 0));
    let mut entries = Vec::new();
    for n in 0..=order {
        for (&(i, j), v) in table.layer(n) {
            entries.push(json!([n, i, j, fmt_rat(v)]));
        }
    }
    let closed = series_coeffs(&p00, order as i64 + 1);
    let json = json!({
        "schema": SCHEMA,
        "command": "law",
        "params": params_json(params),
        "order": order,
        "p00_closed": closed,
        "p00_matches_recurrence": agree,
        "law": entries,
    });
    let mut text = format!("{}\nn  p00(n) closed form\n", params.label());
    for (n, c) in closed.iter().enumerate() {
        text.push_str(&format!("{n}  {c}\n"));
    }
    text.push_str(&format!("closed form matches the exact recurrence: {agree}\n"));
    Ok(Outcome { json, csv: table.to_csv(0, order), text, passed: agree })
}

pub fn verify_law_reports(params: &ChainParams, order: usize, horizon: usize) -> Result<(Vec<Report>, Value)> {
    need_order(order, 6)?;
    if horizon < 5 {
        return Err(Error::InvalidParams(format!("horizon must be at least 5, got {horizon}")));
    }
    let rep = law::verify_law(params, order)?;
    let (erg, trace) = law::ergodicity_observe(params, horizon)?;
    let extra = json!({
        "params": params_json(params),
        "order": order,
        "ergodicity": {
            "ergodic": trace.ergodic,
            "target": trace.target,
            "final_gap": trace.final_gap,
            "expected_divergence": !trace.ergodic,
        },
    });
    Ok((vec![rep, erg], extra))
}

pub fn verify_law(params: &ChainParams, order: usize, horizon: usize) -> Result<Outcome> {
    let (reports, extra) = verify_law_reports(params, order, horizon)?;
    Ok(Outcome::from_reports("verify-law", &reports, extra))
}

pub fn asymptotics_reports(chains: &[ChainParams], prec: usize, max_i: usize) -> Result<(Vec<Report>, Vec<Value>)> {
    let mut reports = Vec::new();
    let mut fits = Vec::new();
    for c in chains {
        let (rep, fit) = st::asymptotics_check(c, prec, max_i)?;
        fits.push(json!({ "params": params_json(c), "fit": fit }));
        reports.push(rep);
    }
    Ok((reports, fits))
}

pub fn asymptotics(chains: &[ChainParams], prec: usize, max_i: usize) -> Result<Outcome> {
    let (reports, fits) = asymptotics_reports(chains, prec, max_i)?;
    Ok(Outcome::from_reports("asymptotics", &reports, json!({ "fits": fits, "max_i": max_i })))
}

pub fn report(order: usize, law_order: usize, prec: usize, grid: usize, tol: f64) -> Result<Outcome> {
    let regimes = default_regimes();
    let ergodic = &regimes[..2];
    let transient = chain((1, 6), (1, 3), (1, 2));
    let law_chains = [regimes[0].clone(), regimes[1].clone(), transient];
    let groups: Vec<Result<Vec<Report>>> = std::thread::scope(|s| {
        let mut handles = Vec::new();
        handles.push(s.spawn(|| verify_count_reports(order, 12)));
        for c in ergodic {
            handles.push(s.spawn(move || verify_stationary_reports(c, prec, grid, tol, 20)));
        }
        for c in &law_chains {
            handles.push(s.spawn(move || verify_law_reports(c, law_order, 60).map(|(r, _)| r)));
        }
        handles.push(s.spawn(|| asymptotics_reports(&regimes, prec, 80).map(|(r, _)| r)));
        handles.into_iter().map(|h| h.join().expect("verification thread panicked")).collect()
    });
    let mut reports = Vec::new();
    for g in groups {
        reports.extend(g?);
    }
    Ok(Outcome::from_reports(
        "report",
        &reports,
        json!({ "order": order, "law_order": law_order, "grid": grid, "prec": prec, "tol": tol }),
    ))
}
