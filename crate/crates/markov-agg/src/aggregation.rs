//! Optimal Markov aggregation, lumpability testing, and the two lifting
//! constructions that bound the aggregation error.

use crate::chain::{DistributionVector, MarkovChain, StochasticMatrix};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Default tolerance separating structural lumpability from near-lumpability.
pub const LUMPABILITY_TOL: f64 = 1e-10;

/// Row masses below this are treated as structural zeros in the P-lifting.
const STRUCTURAL_ZERO: f64 = 1e-300;

/// The best Markov approximation of the g-projection: kernel Q = U^mu P V
/// and marginal nu = V^T mu.
#[derive(Debug, Clone)]
pub struct AggregatedChain {
    q: StochasticMatrix,
    nu: DistributionVector,
    source_partition: Partition,
}

impl AggregatedChain {
    pub fn q(&self) -> &StochasticMatrix {
        &self.q
    }

    pub fn nu(&self) -> &DistributionVector {
        &self.nu
    }

    pub fn partition(&self) -> &Partition {
        &self.source_partition
    }

    pub fn m(&self) -> usize {
        self.q.n()
    }

    /// The aggregated chain as a stationary MarkovChain in its own right.
    pub fn as_chain(&self) -> Result<MarkovChain> {
        MarkovChain::with_distribution(self.q.clone(), self.nu.clone())
    }
}

/// How a lifted kernel was constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftMethod {
    PiLift,
    PLift,
}

/// An aggregated chain lifted back onto the original alphabet.
#[derive(Debug, Clone)]
pub struct LiftedChain {
    phat: StochasticMatrix,
    method: LiftMethod,
    pi_used: Option<DistributionVector>,
}

impl LiftedChain {
    pub fn kernel(&self) -> &StochasticMatrix {
        &self.phat
    }

    pub fn method(&self) -> LiftMethod {
        self.method
    }

    pub fn pi_used(&self) -> Option<&DistributionVector> {
        self.pi_used.as_ref()
    }
}

/// Q_kl = sum_{i in g^-1(k)} sum_{j in g^-1(l)} mu_i P_ij / sum_{i in g^-1(k)} mu_i,
/// nu^T = mu^T V.
pub fn aggregate(x: &MarkovChain, g: &Partition) -> AggregatedChain {
    assert_eq!(x.n(), g.n(), "partition size mismatch");
    let n = x.n();
    let m = g.m();
    let mu = x.mu();
    let mut nu = vec![0.0; m];
    for i in 0..n {
        nu[g.class_of(i)] += mu.get(i);
    }
    let mut q = vec![0.0; m * m];
    for i in 0..n {
        let k = g.class_of(i);
        let w = mu.get(i) / nu[k];
        for (j, &p) in x.p().row(i).iter().enumerate() {
            q[k * m + g.class_of(j)] += w * p;
        }
    }
    let q = StochasticMatrix::from_rows_normalized(m, q);
    let nu = DistributionVector::new(nu).expect("nu inherits validity from mu");
    AggregatedChain { q, nu, source_partition: g.clone() }
}

/// Outcome of the strong-lumpability test.
#[derive(Debug, Clone, Copy)]
pub struct LumpabilityReport {
    pub lumpable: bool,
    pub max_violation: f64,
}

/// Checks strong lumpability: the rows of R = P V must be constant within
/// each partition class. `max_violation` is the largest within-class
/// row difference of R.
pub fn lumpability_check(p: &StochasticMatrix, g: &Partition, tol: f64) -> LumpabilityReport {
    assert_eq!(p.n(), g.n(), "partition size mismatch");
    let m = g.m();
    let r = row_class_masses(p, g);
    let mut max_violation = 0.0_f64;
    for class in g.classes() {
        for l in 0..m {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &i in &class {
                lo = lo.min(r[i * m + l]);
                hi = hi.max(r[i * m + l]);
            }
            max_violation = max_violation.max(hi - lo);
        }
    }
    LumpabilityReport { lumpable: max_violation <= tol, max_violation }
}

/// R_il = sum_{j in g^-1(l)} P_ij, flattened n-by-m.
pub(crate) fn row_class_masses(p: &StochasticMatrix, g: &Partition) -> Vec<f64> {
    let n = p.n();
    let m = g.m();
    let mut r = vec![0.0; n * m];
    for i in 0..n {
        for (j, &v) in p.row(i).iter().enumerate() {
            r[i * m + g.class_of(j)] += v;
        }
    }
    r
}

/// P'_ij = pi_j / (sum of pi over g(j)'s class) * Q_{g(i) g(j)}.
pub fn pi_lift(y: &AggregatedChain, g: &Partition, pi: &DistributionVector) -> Result<LiftedChain> {
    assert_eq!(pi.n(), g.n(), "pi length mismatch");
    pi.require_positive()?;
    let n = g.n();
    let m = g.m();
    let mut class_mass = vec![0.0; m];
    for i in 0..n {
        class_mass[g.class_of(i)] += pi.get(i);
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        let k = g.class_of(i);
        for j in 0..n {
            let l = g.class_of(j);
            entries[i * n + j] = pi.get(j) / class_mass[l] * y.q().get(k, l);
        }
    }
    Ok(LiftedChain {
        phat: StochasticMatrix::from_rows_normalized(n, entries),
        method: LiftMethod::PiLift,
        pi_used: Some(pi.clone()),
    })
}

/// The P-lifting: within-class transition profiles of P scaled to match Q;
/// where a row has zero mass towards a class, Q is spread uniformly.
pub fn p_lift(x: &MarkovChain, y: &AggregatedChain, g: &Partition) -> Result<LiftedChain> {
    assert_eq!(x.n(), g.n(), "partition size mismatch");
    let recomputed = aggregate(x, g);
    let m = g.m();
    let mut deviation = 0.0_f64;
    for k in 0..m {
        for l in 0..m {
            deviation = deviation.max((recomputed.q().get(k, l) - y.q().get(k, l)).abs());
        }
    }
    if deviation > 1e-12 {
        return Err(Error::AggregationMismatch { deviation });
    }

    let n = x.n();
    let r = row_class_masses(x.p(), g);
    let classes = g.classes();
    let class_size: Vec<usize> = classes.iter().map(|c| c.len()).collect();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        let k = g.class_of(i);
        for j in 0..n {
            let l = g.class_of(j);
            let mass = r[i * m + l];
            let q = y.q().get(k, l);
            entries[i * n + j] = if mass > STRUCTURAL_ZERO {
                x.p().get(i, j) / mass * q
            } else {
                q / class_size[l] as f64
            };
        }
    }
    Ok(LiftedChain {
        phat: StochasticMatrix::from_rows_normalized(n, entries),
        method: LiftMethod::PLift,
        pi_used: None,
    })
}
