//! Power iteration of the chain on a finite grid, in double-double.

use serde::Serialize;

use super::dd::Dd;
use super::real::Real;
use super::ChainParams;
use crate::error::{Error, Result};

/// Values below this are dropped; they cannot affect any reported digit.
const FLUSH: f64 = 1e-40;

#[derive(Clone, Debug, Serialize)]
pub struct StationaryEstimate {
    pub grid: usize,
    #[serde(skip)]
    probs: Vec<f64>,
    /// L1 norm of `mu T - mu` at the last step.
    pub residual: f64,
    pub mass: f64,
    /// Mass that left the grid during the last step.
    pub lost: f64,
    pub iterations: usize,
}

impl StationaryEstimate {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < self.grid && j < self.grid {
            self.probs[i * self.grid + j]
        } else {
            0.0
        }
    }

    /// `Q(x, y) = p00 + r' P1(x) + r'' P2(y) + r P(x, y)`, with `P1`, `P2`
    /// and `P` the generating functions of the x-axis, y-axis and interior.
    pub fn q_value(&self, params: &ChainParams, x: f64, y: f64) -> f64 {
        let rp = Real::from_rat(&params.r_prime(), 64).to_f64();
        let rs = Real::from_rat(&params.r_second(), 64).to_f64();
        let r = Real::from_rat(&params.r, 64).to_f64();
        let mut total = 0.0;
        for i in (0..self.grid).rev() {
            let mut row = 0.0;
            for j in (0..self.grid).rev() {
                let w = match (i, j) {
                    (0, 0) => 1.0,
                    (_, 0) => rp,
                    (0, _) => rs,
                    _ => r,
                };
                row = row * y + w * self.get(i, j);
            }
            total = total * x + row;
        }
        total
    }
}

struct Probs {
    p: Dd,
    q: Dd,
    r: Dd,
    pp: Dd,
    rp: Dd,
    qs: Dd,
    rs: Dd,
}

fn dd_of(r: &crate::series::Rat) -> Dd {
    let x = Real::from_rat(r, 160);
    let hi = x.to_f64();
    let lo = (&x - &Real::from_f64(hi, 160)).to_f64();
    Dd { hi, lo }
}

fn step(cur: &[Dd], next: &mut [Dd], g: usize, pr: &Probs) -> Dd {
    next.iter_mut().for_each(|v| *v = Dd::ZERO);
    let mut lost = Dd::ZERO;
    for i in 0..g {
        for j in 0..g {
            let m = cur[i * g + j];
            if m.is_zero() {
                continue;
            }
            let (ne, w, s) = match (i > 0, j > 0) {
                (false, false) => (m, None, None),
                (true, false) => (m * pr.rp, Some(m * pr.pp), None),
                (false, true) => (m * pr.rs, None, Some(m * pr.qs)),
                (true, true) => (m * pr.r, Some(m * pr.p), Some(m * pr.q)),
            };
            if i + 1 < g && j + 1 < g {
                next[(i + 1) * g + j + 1] += ne;
            } else {
                lost += ne;
            }
            if let Some(w) = w {
                next[(i - 1) * g + j] += w;
            }
            if let Some(s) = s {
                next[i * g + j - 1] += s;
            }
        }
    }
    for v in next.iter_mut() {
        if v.hi.abs() < FLUSH {
            *v = Dd::ZERO;
        }
    }
    lost
}

/// Iterates `mu <- mu T` from `(d + dT + dT^2)/3`, `d` the point mass at the
/// origin (a start that is already balanced across the period-3 classes),
/// until the L1 change drops below `tol`.
pub fn stationary_numeric(
    params: &ChainParams,
    grid: usize,
    tol: f64,
    max_iter: usize,
) -> Result<StationaryEstimate> {
    params.require_ergodic()?;
    if grid < 4 {
        return Err(Error::InvalidParams(format!("grid must be at least 4, got {grid}")));
    }
    let pr = Probs {
        p: dd_of(&params.p),
        q: dd_of(&params.q),
        r: dd_of(&params.r),
        pp: dd_of(&params.p_prime()),
        rp: dd_of(&params.r_prime()),
        qs: dd_of(&params.q_second()),
        rs: dd_of(&params.r_second()),
    };
    let g = grid;
    let third = dd_of(&crate::series::rat(1, 3));
    let mut a = vec![Dd::ZERO; g * g];
    a[0] = Dd::new(1.0);
    let mut b = vec![Dd::ZERO; g * g];
    let mut c = vec![Dd::ZERO; g * g];
    step(&a, &mut b, g, &pr);
    step(&b, &mut c, g, &pr);
    let mut cur: Vec<Dd> = (0..g * g).map(|k| (a[k] + b[k] + c[k]) * third).collect();
    let mut next = b;
    let mut residual = f64::INFINITY;
    let mut lost = Dd::ZERO;
    let mut iterations = 0;
    while iterations < max_iter {
        lost = step(&cur, &mut next, g, &pr);
        iterations += 1;
        residual = cur.iter().zip(&next).map(|(u, v)| (*v - *u).abs().to_f64()).sum();
        std::mem::swap(&mut cur, &mut next);
        if residual < tol {
            break;
        }
    }
    if residual >= tol {
        return Err(Error::NoConvergence(format!(
            "power iteration residual {residual:.3e} after {iterations} steps (tolerance {tol:.1e})"
        )));
    }
    let mut mass = Dd::ZERO;
    for v in &cur {
        mass += *v;
    }
    Ok(StationaryEstimate {
        grid: g,
        probs: cur.iter().map(|v| v.to_f64()).collect(),
        residual,
        mass: mass.to_f64(),
        lost: lost.to_f64(),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    #[test]
    fn small_grid_converges() {
        let c = ChainParams::new(rat(1, 3), rat(1, 2), rat(1, 6)).unwrap();
        let est = stationary_numeric(&c, 60, 1e-12, 100_000).unwrap();
        assert!((est.mass - 1.0).abs() < 1e-10);
        assert!(est.get(0, 0) > 0.0);
    }
}
