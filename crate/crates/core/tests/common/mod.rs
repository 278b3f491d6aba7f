#![allow(dead_code)]

use couplings::coupling::Connection;
use couplings::rational::{int, Rational};
use couplings::{scenario_from_correlations, PairDistribution, Scenario};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

/// Uniform `k / den` with `|k| <= den`.
pub fn signed_grid<R: Rng>(rng: &mut R, den: i64) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(-den..=den)), BigInt::from(den))
}

pub fn unit_grid<R: Rng>(rng: &mut R, den: i64) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(0..=den)), BigInt::from(den))
}

/// Correlations in `[-1, 1]^4`, a quarter of them placed exactly on a Bell
/// facet and another quarter one grid step outside it.
pub fn random_correlations<R: Rng>(rng: &mut R) -> [Rational; 4] {
    let den = *[4i64, 10, 97, 1000, 1 << 20]
        .get(rng.gen_range(0..5))
        .unwrap();
    loop {
        let mut e: [Rational; 4] = std::array::from_fn(|_| signed_grid(rng, den));
        let kind = rng.gen_range(0..4);
        if kind >= 2 {
            // sum - 2 e_k = +-2, optionally nudged outward.
            let k = rng.gen_range(0..4);
            let side = if rng.gen_bool(0.5) { int(1) } else { int(-1) };
            let others: Rational = (0..4).filter(|&i| i != k).map(|i| e[i].clone()).sum();
            let mut ek = others - &side * int(2);
            if kind == 3 {
                ek -= &side * Rational::new(BigInt::one(), BigInt::from(den));
            }
            if ek.abs() > int(1) {
                continue;
            }
            e[k] = ek;
        }
        return e;
    }
}

pub fn random_uniform_scenario<R: Rng>(rng: &mut R) -> Scenario {
    scenario_from_correlations(&random_correlations(rng)).unwrap()
}

/// Any pair distribution on a small grid, zeros included.
pub fn random_pair<R: Rng>(rng: &mut R) -> PairDistribution {
    loop {
        let w: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..=12));
        let total: i64 = w.iter().sum();
        if total == 0 {
            continue;
        }
        let cells = w.map(|x| Rational::new(BigInt::from(x), BigInt::from(total)));
        return PairDistribution::from_cells(cells).unwrap();
    }
}

/// Arbitrary scenario, usually signaling.
pub fn random_scenario<R: Rng>(rng: &mut R) -> Scenario {
    Scenario::new(std::array::from_fn(|_| random_pair(rng)))
}

/// Cycle oracle for uniform marginals. The eight constrained pairs form
/// the cycle A11-B11-B21-A21-A22-B22-B12-A12-A11, and zero-mean +-1
/// variables with prescribed edge correlations exist iff every signing of
/// the edges with an odd number of minus signs sums to at most 6.
pub fn cycle_oracle(e: &[Rational; 4], c: &[Rational; 4]) -> bool {
    let conn = |w: Connection| &c[w as usize];
    let edges = [
        &e[0],
        conn(Connection::B1),
        &e[2],
        conn(Connection::A2),
        &e[3],
        conn(Connection::B2),
        &e[1],
        conn(Connection::A1),
    ];
    let six = int(6);
    (0u16..256).filter(|m| m.count_ones() % 2 == 1).all(|mask| {
        let sum: Rational = edges
            .iter()
            .enumerate()
            .map(|(k, x)| {
                if mask >> k & 1 == 1 {
                    -(*x).clone()
                } else {
                    (*x).clone()
                }
            })
            .sum();
        sum <= six
    })
}

/// Exact solution of a square or tall system by Gaussian elimination.
/// Returns `None` if the columns are dependent or the system inconsistent.
pub fn solve_unique(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, rhs)| {
            let mut r = r.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..cols {
        let found = (pivot_row..rows).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot_row, found);
        let p = m[pivot_row][col].clone();
        for x in m[pivot_row].iter_mut() {
            *x /= &p;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot = m[pivot_row].clone();
                for (x, p) in m[r].iter_mut().zip(&pivot) {
                    *x -= &f * p;
                }
            }
        }
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    Some((0..cols).map(|k| m[k][cols].clone()).collect())
}

/// All basic feasible solutions of `{x >= 0 : A x = b}`.
pub fn basic_feasible_solutions(
    a: &[Vec<Rational>],
    b: &[Rational],
    n: usize,
) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|&j| mask >> j & 1 == 1).collect();
        let sub: Vec<Vec<Rational>> = a
            .iter()
            .map(|row| cols.iter().map(|&j| row[j].clone()).collect())
            .collect();
        let sol = if cols.is_empty() {
            b.iter().all(Zero::is_zero).then(Vec::new)
        } else if a.is_empty() {
            None
        } else {
            solve_unique(&sub, b)
        };
        if let Some(xs) = sol {
            if xs.iter().all(|x| !x.is_negative()) {
                let mut x = vec![Rational::zero(); n];
                for (&j, v) in cols.iter().zip(xs) {
                    x[j] = v;
                }
                out.push(x);
            }
        }
    }
    out
}
