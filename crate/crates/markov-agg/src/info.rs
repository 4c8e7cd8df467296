//! Information-theoretic functionals in bits: entropies, rates, the KL
//! divergence rate between Markov chains, relevant information losses, and
//! the exact finite-n divergence between a projection and its aggregation.

use crate::aggregation::{aggregate, row_class_masses, LiftedChain};
use crate::chain::{DistributionVector, MarkovChain, StochasticMatrix};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Enumeration bound for the finite-n projected-sequence divergence.
pub const SEQUENCE_BOUND: u128 = 1_000_000;

#[inline]
fn xlog2x(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy in bits, with the 0 log 0 = 0 convention.
pub fn entropy(p: &DistributionVector) -> f64 {
    -p.entries().iter().copied().map(xlog2x).sum::<f64>()
}

fn entropy_of(slice: &[f64]) -> f64 {
    -slice.iter().copied().map(xlog2x).sum::<f64>()
}

/// Entropy rate of a stationary chain in bits per sample:
/// -sum_ij mu_i P_ij log2 P_ij.
pub fn entropy_rate(x: &MarkovChain) -> f64 {
    let mu = x.mu();
    x.p()
        .rows()
        .enumerate()
        .map(|(i, row)| mu.get(i) * entropy_of(row))
        .sum()
}

/// KL divergence rate between X and the chain with kernel `pprime`, in bits
/// per sample. Requires the zero pattern of `pprime` to dominate P.
pub fn kldr_markov(x: &MarkovChain, pprime: &StochasticMatrix) -> Result<f64> {
    assert_eq!(x.n(), pprime.n(), "alphabet size mismatch");
    let n = x.n();
    let mu = x.mu();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let p = x.p().get(i, j);
            if p == 0.0 {
                continue;
            }
            let q = pprime.get(i, j);
            if q == 0.0 {
                return Err(Error::AbsoluteContinuityViolation { i, j, p });
            }
            acc += mu.get(i) * p * (p / q).log2();
        }
    }
    // rounding can push an exact zero slightly negative
    Ok(acc.max(0.0))
}

/// Relevant information loss of the projection, together with the raw
/// conditional entropy H(X_n | Y_{g,n-1}) it is computed from.
#[derive(Debug, Clone, Copy)]
pub struct RelevantLossX {
    pub loss: f64,
    pub cond_entropy: f64,
}

/// L_{X_n}(X_{n-1} -> Y_{g,n-1}) and H(X_n | Y_{g,n-1}), from the stationary
/// joint mu_i P_ij marginalized through g on the first coordinate.
pub fn relevant_loss_x(x: &MarkovChain, g: &Partition) -> RelevantLossX {
    let n = x.n();
    let m = g.m();
    let mu = x.mu();
    // joint[k][j] = Pr(Y_{n-1} = k, X_n = j)
    let mut joint = vec![0.0; m * n];
    let mut nu = vec![0.0; m];
    for i in 0..n {
        let k = g.class_of(i);
        nu[k] += mu.get(i);
        for (j, &p) in x.p().row(i).iter().enumerate() {
            joint[k * n + j] += mu.get(i) * p;
        }
    }
    let mut cond_entropy = 0.0;
    for k in 0..m {
        for j in 0..n {
            let pj = joint[k * n + j];
            if pj > 0.0 {
                cond_entropy -= pj * (pj / nu[k]).log2();
            }
        }
    }
    let loss = (cond_entropy - entropy_rate(x)).max(0.0);
    RelevantLossX { loss, cond_entropy }
}

/// L_{Y_{g,n}}(X_{n-1} -> Y_{g,n-1}) = H(Y_n | Y_{n-1}) - H(Y_n | X_{n-1}),
/// both from the stationary joint pushed through g. Equals the KLDR between
/// X and its P-lifting.
pub fn relevant_loss_y(x: &MarkovChain, g: &Partition) -> f64 {
    let n = x.n();
    let m = g.m();
    let mu = x.mu();
    let r = row_class_masses(x.p(), g);
    // h_y_given_x = H(Y_n | X_{n-1})
    let mut h_y_given_x = 0.0;
    for i in 0..n {
        h_y_given_x += mu.get(i) * entropy_of(&r[i * m..(i + 1) * m]);
    }
    // joint of (Y_{n-1}, Y_n)
    let mut joint = vec![0.0; m * m];
    let mut nu = vec![0.0; m];
    for i in 0..n {
        let k = g.class_of(i);
        nu[k] += mu.get(i);
        for l in 0..m {
            joint[k * m + l] += mu.get(i) * r[i * m + l];
        }
    }
    let mut h_y_given_y = 0.0;
    for k in 0..m {
        for l in 0..m {
            let pj = joint[k * m + l];
            if pj > 0.0 {
                h_y_given_y -= pj * (pj / nu[k]).log2();
            }
        }
    }
    (h_y_given_y - h_y_given_x).max(0.0)
}

/// Redundancy-rate difference R(X) - R(Y'_g); equals the KLDR between X and
/// the pi-lifting with pi = mu.
pub fn mu_lift_bound(x: &MarkovChain, g: &Partition) -> f64 {
    let y = aggregate(x, g);
    let redundancy_x = entropy(x.mu()) - entropy_rate(x);
    let agg_rate: f64 = y
        .q()
        .rows()
        .enumerate()
        .map(|(k, row)| y.nu().get(k) * entropy_of(row))
        .sum();
    let redundancy_y = entropy(y.nu()) - agg_rate;
    (redundancy_x - redundancy_y).max(0.0)
}

/// Exact divergence D(Y_1^n || Y'_1^n) between the projected process and the
/// aggregated Markov chain, by enumerating all m^n projected sequences.
/// The projection probability uses the forward recursion over P; the model
/// probability is the (nu, Q) chain.
pub fn finite_n_projection_kld(x: &MarkovChain, g: &Partition, n_steps: usize) -> Result<f64> {
    assert!(n_steps >= 2, "need at least two samples");
    let m = g.m();
    let count = (m as u128).checked_pow(n_steps as u32).unwrap_or(u128::MAX);
    if count > SEQUENCE_BOUND {
        return Err(Error::TooManySequences { count, bound: SEQUENCE_BOUND });
    }
    let y = aggregate(x, g);
    let n = x.n();
    let mu = x.mu();

    let mut divergence = 0.0;
    let mut seq = vec![0usize; n_steps];
    loop {
        // forward recursion for p(y_1^n)
        let mut alpha: Vec<f64> = (0..n)
            .map(|s| if g.class_of(s) == seq[0] { mu.get(s) } else { 0.0 })
            .collect();
        for &label in &seq[1..] {
            let mut next = vec![0.0; n];
            for i in 0..n {
                let a = alpha[i];
                if a == 0.0 {
                    continue;
                }
                for (j, &p) in x.p().row(i).iter().enumerate() {
                    if g.class_of(j) == label {
                        next[j] += a * p;
                    }
                }
            }
            alpha = next;
        }
        let p_seq: f64 = alpha.iter().sum();
        if p_seq > 0.0 {
            let mut q_seq = y.nu().get(seq[0]);
            for w in seq.windows(2) {
                q_seq *= y.q().get(w[0], w[1]);
            }
            // p > 0 forces q > 0: every projected transition with positive
            // probability has positive aggregated mass
            divergence += p_seq * (p_seq / q_seq).log2();
        }

        // next sequence, odometer order
        let mut pos = n_steps;
        loop {
            if pos == 0 {
                return Ok(divergence.max(0.0));
            }
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < m {
                break;
            }
            seq[pos] = 0;
        }
    }
}

/// One metric report line set for a (chain, partition) pair.
#[derive(Debug, Clone, Copy)]
pub struct MetricReport {
    pub kldr_p: f64,
    pub kldr_mu: f64,
    pub loss_x: f64,
    pub loss_y: f64,
    pub h_rate: f64,
    pub lumpable: bool,
}

/// Evaluates both lifting bounds and the information losses for a partition.
pub fn evaluate(x: &MarkovChain, g: &Partition, tol: f64) -> Result<MetricReport> {
    let y = aggregate(x, g);
    let plifted = crate::aggregation::p_lift(x, &y, g)?;
    let kldr_p = kldr_markov(x, plifted.kernel())?;
    let kldr_mu = mu_lift_bound(x, g);
    let loss = relevant_loss_x(x, g);
    let loss_y = relevant_loss_y(x, g);
    let report = crate::aggregation::lumpability_check(x.p(), g, tol);
    Ok(MetricReport {
        kldr_p,
        kldr_mu,
        loss_x: loss.loss,
        loss_y,
        h_rate: entropy_rate(x),
        lumpable: report.lumpable,
    })
}

/// Convenience: the P-lifting of the optimal aggregation.
pub fn p_lift_of(x: &MarkovChain, g: &Partition) -> Result<LiftedChain> {
    let y = aggregate(x, g);
    crate::aggregation::p_lift(x, &y, g)
}
