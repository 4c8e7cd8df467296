//! Shared helpers for integration tests: an independent stationary-vector
//! oracle based on Gaussian elimination and seeded random chain generators.
#![allow(dead_code)] // each test target uses a different subset

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use markov_agg::{MarkovChain, StochasticMatrix};

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Panics on a singular system; only used on well-posed test inputs.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        assert!(a[pivot][col].abs() > 1e-14, "singular system");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Stationary distribution by direct linear solve of mu^T P = mu^T together
/// with the normalization constraint; independent of power iteration.
pub fn stationary_by_elimination(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    // (P^T - I) mu = 0 with the last equation replaced by sum(mu) = 1
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = rows[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[n - 1][j] = 1.0;
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    solve_linear(a, b)
}

/// Regularity check by brute force: some power up to the Wielandt bound is
/// entrywise positive. Uses plain matrix products, nothing from the library.
pub fn is_regular_bruteforce(rows: &[Vec<f64>]) -> bool {
    let n = rows.len();
    let bound = (n - 1) * (n - 1) + 1;
    let mut power = rows.to_vec();
    for _ in 0..bound {
        if power.iter().all(|r| r.iter().all(|&v| v > 0.0)) {
            return true;
        }
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                if power[i][k] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    next[i][j] += power[i][k] * rows[k][j];
                }
            }
        }
        power = next;
    }
    false
}

/// Raw rows of a random chain: entries drawn uniformly, a random subset
/// zeroed out, rows renormalized; resampled until regular.
pub fn random_regular_rows(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    loop {
        let mut rows = vec![vec![0.0; n]; n];
        for row in rows.iter_mut() {
            loop {
                let mut sum = 0.0;
                for v in row.iter_mut() {
                    *v = if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.05..1.0) };
                    sum += *v;
                }
                if sum > 0.0 {
                    for v in row.iter_mut() {
                        *v /= sum;
                    }
                    break;
                }
            }
        }
        if is_regular_bruteforce(&rows) {
            return rows;
        }
    }
}

pub fn random_regular_chain(rng: &mut ChaCha8Rng, n: usize) -> MarkovChain {
    let rows = random_regular_rows(rng, n);
    MarkovChain::new(StochasticMatrix::new(rows, false).unwrap()).unwrap()
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
