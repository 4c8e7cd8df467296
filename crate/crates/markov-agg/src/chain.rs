//! Finite discrete-time Markov chains: row-stochastic matrices, probability
//! vectors, stationary distributions and regularity checking.

use crate::error::{Error, Result};

/// Row-sum tolerance accepted by the constructors.
pub const ROW_SUM_TOL: f64 = 1e-9;
/// Row-sum tolerance for raw input when renormalization is disabled.
pub const ROW_SUM_INPUT_TOL: f64 = 1e-6;
/// Residual tolerance for stationary distributions.
pub const STATIONARY_TOL: f64 = 1e-10;

const POWER_ITER_BUDGET: usize = 100_000;
const POWER_ITER_STEP_TOL: f64 = 1e-12;

/// A row-stochastic square matrix, stored dense in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl StochasticMatrix {
    /// Validates a raw square matrix as row-stochastic. With `renormalize`
    /// each row is divided by its sum; otherwise row sums must already be
    /// within `ROW_SUM_INPUT_TOL` of one.
    pub fn new(raw: Vec<Vec<f64>>, renormalize: bool) -> Result<Self> {
        let n = raw.len();
        if n == 0 {
            return Err(Error::NotSquare { rows: 0, row: 0, cols: 0 });
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in raw.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare { rows: n, row: i, cols: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteEntry { row: i, col: j });
                }
                if v < 0.0 {
                    return Err(Error::NegativeEntry { row: i, col: j, value: v });
                }
            }
            let sum: f64 = row.iter().sum();
            if renormalize {
                if sum == 0.0 {
                    return Err(Error::ZeroRow { row: i });
                }
                entries.extend(row.iter().map(|v| v / sum));
            } else {
                if (sum - 1.0).abs() > ROW_SUM_INPUT_TOL {
                    return Err(Error::RowSumViolation { row: i, sum });
                }
                entries.extend(row.iter().copied());
            }
        }
        let m = Self { n, entries };
        m.assert_row_stochastic();
        Ok(m)
    }

    /// Builds a matrix from rows already known to be stochastic up to
    /// floating-point noise (derived matrices such as Q, P' and P-hat).
    /// Each row is rescaled by its sum to keep the row-sum invariant exact.
    pub(crate) fn from_rows_normalized(n: usize, mut entries: Vec<f64>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        for i in 0..n {
            let sum: f64 = entries[i * n..(i + 1) * n].iter().sum();
            debug_assert!((sum - 1.0).abs() <= 1e-8, "row {i} sums to {sum}");
            for v in &mut entries[i * n..(i + 1) * n] {
                *v /= sum;
            }
        }
        let m = Self { n, entries };
        m.assert_row_stochastic();
        m
    }

    fn assert_row_stochastic(&self) {
        for i in 0..self.n {
            let sum: f64 = self.row(i).iter().sum();
            assert!(
                (sum - 1.0).abs() <= ROW_SUM_TOL,
                "row {i} sums to {sum} after construction"
            );
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.n)
    }

    /// True iff some power P^k with k = (n-1)^2 + 1 is entrywise positive
    /// (Wielandt's bound). Works on the zero/nonzero pattern so large powers
    /// cannot underflow.
    pub fn is_regular(&self) -> bool {
        let n = self.n;
        let pattern: Vec<bool> = self.entries.iter().map(|&v| v > 0.0).collect();
        let k = (n - 1) * (n - 1) + 1;
        let power = bool_mat_pow(&pattern, n, k);
        power.iter().all(|&b| b)
    }

    /// Stationary distribution via power iteration. Falls back to damped
    /// (Cesaro-style) iteration on the lazy kernel (P + I)/2 when plain
    /// iteration stalls, e.g. for nearly periodic chains.
    pub fn stationary_distribution(&self) -> Result<DistributionVector> {
        let n = self.n;
        if n == 1 {
            return DistributionVector::new(vec![1.0]);
        }
        let uniform = vec![1.0 / n as f64; n];
        let plain = self.power_iterate(&uniform, POWER_ITER_BUDGET / 2, false);
        let mu = match plain {
            Some(mu) => mu,
            None => self
                .power_iterate(&uniform, POWER_ITER_BUDGET, true)
                .ok_or(Error::NotConverged { budget: POWER_ITER_BUDGET })?,
        };
        let residual = self.stationary_residual(&mu);
        if residual > STATIONARY_TOL {
            return Err(Error::NotConverged { budget: POWER_ITER_BUDGET });
        }
        DistributionVector::new(mu)
    }

    fn power_iterate(&self, start: &[f64], budget: usize, damped: bool) -> Option<Vec<f64>> {
        let n = self.n;
        let mut cur = start.to_vec();
        let mut next = vec![0.0; n];
        for _ in 0..budget {
            for v in next.iter_mut() {
                *v = 0.0;
            }
            for i in 0..n {
                let w = cur[i];
                if w == 0.0 {
                    continue;
                }
                for (j, &p) in self.row(i).iter().enumerate() {
                    next[j] += w * p;
                }
            }
            if damped {
                for j in 0..n {
                    next[j] = 0.5 * (next[j] + cur[j]);
                }
            }
            let total: f64 = next.iter().sum();
            for v in next.iter_mut() {
                *v /= total;
            }
            let diff = cur
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            std::mem::swap(&mut cur, &mut next);
            if diff < POWER_ITER_STEP_TOL {
                return Some(cur);
            }
        }
        None
    }

    /// max_j |(mu^T P)_j - mu_j|
    pub fn stationary_residual(&self, mu: &[f64]) -> f64 {
        let n = self.n;
        let mut residual = 0.0_f64;
        for j in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                acc += mu[i] * self.get(i, j);
            }
            residual = residual.max((acc - mu[j]).abs());
        }
        residual
    }
}

fn bool_mat_mul(a: &[bool], b: &[bool], n: usize) -> Vec<bool> {
    let mut out = vec![false; n * n];
    for i in 0..n {
        for k in 0..n {
            if a[i * n + k] {
                for j in 0..n {
                    if b[k * n + j] {
                        out[i * n + j] = true;
                    }
                }
            }
        }
    }
    out
}

fn bool_mat_pow(base: &[bool], n: usize, mut exp: usize) -> Vec<bool> {
    let mut result: Vec<bool> = (0..n * n).map(|idx| idx / n == idx % n).collect();
    let mut base = base.to_vec();
    while exp > 0 {
        if exp & 1 == 1 {
            result = bool_mat_mul(&result, &base, n);
        }
        exp >>= 1;
        if exp > 0 {
            base = bool_mat_mul(&base, &base, n);
        }
    }
    result
}

/// A probability row vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionVector {
    entries: Vec<f64>,
    strictly_positive: bool,
}

impl DistributionVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        for (index, &value) in entries.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeProbability { index, value });
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::DistributionSumViolation { sum });
        }
        let strictly_positive = entries.iter().all(|&v| v > 0.0);
        Ok(Self { entries, strictly_positive })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries[i]
    }

    pub fn strictly_positive(&self) -> bool {
        self.strictly_positive
    }

    /// Errors unless every entry is positive (required of pi and mu).
    pub fn require_positive(&self) -> Result<()> {
        match self.entries.iter().position(|&v| v <= 0.0) {
            None => Ok(()),
            Some(index) => Err(Error::NonPositivePi { index, value: self.entries[index] }),
        }
    }
}

/// A stationary Markov chain: kernel, invariant distribution, regularity flag.
#[derive(Debug, Clone)]
pub struct MarkovChain {
    p: StochasticMatrix,
    mu: DistributionVector,
    regular: bool,
}

impl MarkovChain {
    /// Builds a stationary chain, solving for the invariant distribution.
    pub fn new(p: StochasticMatrix) -> Result<Self> {
        if !p.is_regular() {
            return Err(Error::NotRegular);
        }
        let mu = p.stationary_distribution()?;
        Ok(Self { p, mu, regular: true })
    }

    /// Builds a chain from a kernel and a distribution claimed stationary.
    /// Checks stationarity (1e-8 componentwise) but not regularity; the
    /// `regular` flag is computed from the zero pattern.
    pub fn with_distribution(p: StochasticMatrix, mu: DistributionVector) -> Result<Self> {
        let residual = p.stationary_residual(mu.entries());
        if residual > 1e-8 {
            return Err(Error::NotStationary { residual });
        }
        let regular = p.is_regular();
        Ok(Self { p, mu, regular })
    }

    pub fn p(&self) -> &StochasticMatrix {
        &self.p
    }

    pub fn mu(&self) -> &DistributionVector {
        &self.mu
    }

    pub fn n(&self) -> usize {
        self.p.n()
    }

    pub fn regular(&self) -> bool {
        self.regular
    }
}
