//! Brute-force counts of Kreweras walks and the closed-form count formulas.
//!
//! Steps are North-East `(1, 1)`, West `(-1, 0)` and South `(0, -1)`; walks
//! start at the origin and stay in the quadrant `i, j >= 0`.

use std::fmt::Write as _;

use num::integer::binomial;
use num::{BigUint, Integer, One, Zero};

pub const STEPS: [(i64, i64); 3] = [(1, 1), (-1, 0), (0, -1)];

/// `a_{i,j}(n)` for every `n <= n_max`.
#[derive(Clone, Debug)]
pub struct WalkTable {
    n_max: usize,
    side: usize,
    layers: Vec<Vec<BigUint>>,
}

impl WalkTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of `n`-step walks ending at `(i, j)`; zero outside the table.
    pub fn get(&self, n: usize, i: usize, j: usize) -> BigUint {
        if n > self.n_max || i >= self.side || j >= self.side {
            return BigUint::zero();
        }
        self.layers[n][i * self.side + j].clone()
    }

    /// Nonzero entries `(i, j, count)` of layer `n`.
    pub fn entries(&self, n: usize) -> impl Iterator<Item = (usize, usize, &BigUint)> + '_ {
        let side = self.side;
        self.layers[n]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (k / side, k % side, c))
    }

    /// Number of `n`-step walks ending anywhere.
    pub fn total(&self, n: usize) -> BigUint {
        self.layers[n].iter().sum()
    }

    /// CSV slice `n, i, j, count` over `n_lo..=n_hi`, nonzero entries only.
    pub fn to_csv(&self, n_lo: usize, n_hi: usize) -> String {
        let mut out = String::from("n,i,j,count\n");
        for n in n_lo..=n_hi.min(self.n_max) {
            for (i, j, c) in self.entries(n) {
                writeln!(out, "{n},{i},{j},{c}").unwrap();
            }
        }
        out
    }
}

/// Dynamic programming over the three steps with the quadrant constraint.
pub fn build_walk_table(n_max: usize) -> WalkTable {
    // One sentinel row/column past n_max keeps the i+1, j+1 reads in bounds.
    let side = n_max + 2;
    let mut layers = Vec::with_capacity(n_max + 1);
    let mut first = vec![BigUint::zero(); side * side];
    first[0] = BigUint::one();
    layers.push(first);
    for n in 1..=n_max {
        let prev: &Vec<BigUint> = &layers[n - 1];
        let mut cur = vec![BigUint::zero(); side * side];
        for i in 0..=n {
            for j in 0..=n {
                let mut c = BigUint::zero();
                if i >= 1 && j >= 1 {
                    c += &prev[(i - 1) * side + (j - 1)];
                }
                c += &prev[(i + 1) * side + j];
                c += &prev[i * side + (j + 1)];
                cur[i * side + j] = c;
            }
        }
        layers.push(cur);
    }
    WalkTable { n_max, side, layers }
}

fn big(n: u64) -> BigUint {
    BigUint::from(n)
}

fn binom(n: u64, k: u64) -> BigUint {
    binomial(big(n), big(k))
}

fn exact_div(num: BigUint, den: BigUint, what: &str) -> BigUint {
    let (q, r) = num.div_rem(&den);
    assert!(r.is_zero(), "{what} is not an integer");
    q
}

/// Walks of length `3n` returning to the origin: `4^n / ((n+1)(2n+1)) * C(3n, n)`.
pub fn kreweras_count(n: u64) -> BigUint {
    let num = big(4).pow(n as u32) * binom(3 * n, n);
    exact_div(num, big((n + 1) * (2 * n + 1)), "kreweras_count")
}

/// `a_{i,0}(3n + 2i) = 4^n (2i+1) / ((n+i+1)(2n+2i+1)) * C(2i, i) * C(3n+2i, n)`.
pub fn axis_count(i: u64, n: u64) -> BigUint {
    let num = big(4).pow(n as u32) * big(2 * i + 1) * binom(2 * i, i) * binom(3 * n + 2 * i, n);
    exact_div(num, big((n + i + 1) * (2 * n + 2 * i + 1)), "axis_count")
}

pub fn catalan(i: u64) -> BigUint {
    exact_div(binom(2 * i, i), big(i + 1), "catalan")
}

/// Square-lattice (N, S, E, W) quadrant walks of length `2n` returning to the origin:
/// `C(2n+2, n+1)^2 / ((2n+1)(2n+4))`.
pub fn square_lattice_count(n: u64) -> BigUint {
    let c = binom(2 * n + 2, n + 1);
    exact_div(&c * &c, big((2 * n + 1) * (2 * n + 4)), "square_lattice_count")
}

/// Independent DP count of square-lattice quadrant walks of length `len`
/// returning to the origin.
pub fn square_lattice_oracle(len: usize) -> BigUint {
    let side = len + 2;
    let mut cur = vec![BigUint::zero(); side * side];
    cur[0] = BigUint::one();
    for _ in 0..len {
        let mut next = vec![BigUint::zero(); side * side];
        for i in 0..side - 1 {
            for j in 0..side - 1 {
                let c = &cur[i * side + j];
                if c.is_zero() {
                    continue;
                }
                next[(i + 1) * side + j] += c;
                next[i * side + j + 1] += c;
                if i > 0 {
                    next[(i - 1) * side + j] += c;
                }
                if j > 0 {
                    next[i * side + j - 1] += c;
                }
            }
        }
        cur = next;
    }
    cur[0].clone()
}
