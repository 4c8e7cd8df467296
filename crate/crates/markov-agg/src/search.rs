//! Partition search: greedy agglomerative merging under the information
//! bottleneck relaxation, exhaustive enumeration, and the M-sweep.

use crate::chain::MarkovChain;
use crate::error::{Error, Result};
use crate::info::{evaluate, relevant_loss_x};
use crate::partition::{enumerate_partitions, Partition};

/// Search criterion for the exhaustive minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    /// KLDR between X and its P-lifting (the exact upper bound).
    PLiftKldr,
    /// Relevant information loss L_{X_n} (the IB relaxation).
    LossX,
}

/// Per-M record of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub m: usize,
    pub partition: Partition,
    pub kldr_p: f64,
    pub kldr_mu: f64,
    pub loss_x: f64,
    pub lumpable: bool,
}

/// Options for the fixed-class constraint.
#[derive(Debug, Clone)]
pub struct FixedClass {
    /// 0-based state indices that are pre-merged into one class.
    pub states: Vec<usize>,
    /// When false (the default), the fixed set remains exactly one final
    /// class and never merges with other classes. When true it participates
    /// in merging like any other class.
    pub mergeable: bool,
}

impl FixedClass {
    pub fn frozen(states: Vec<usize>) -> Self {
        Self { states, mergeable: false }
    }
}

fn validate_fixed(fixed: &FixedClass, n: usize) -> Result<()> {
    if fixed.states.is_empty() || fixed.states.iter().any(|&s| s >= n) {
        return Err(Error::InvalidFixedSet { n });
    }
    Ok(())
}

fn initial_partition(n: usize, fixed: Option<&FixedClass>) -> Result<Partition> {
    match fixed {
        None => Ok(Partition::identity(n)),
        Some(f) => {
            validate_fixed(f, n)?;
            let mut member = vec![false; n];
            for &s in &f.states {
                member[s] = true;
            }
            let mut raw = Vec::with_capacity(n);
            let mut next = 1usize;
            let mut fixed_label = 0usize;
            for i in 0..n {
                if member[i] {
                    if fixed_label == 0 {
                        fixed_label = next;
                        next += 1;
                    }
                    raw.push(fixed_label);
                } else {
                    raw.push(next);
                    next += 1;
                }
            }
            Partition::canonicalize(&raw)
        }
    }
}

/// Index of the class holding the fixed set in a partition derived from
/// `initial_partition` (merging preserves membership as one block).
fn fixed_class_index(g: &Partition, fixed: &FixedClass) -> usize {
    g.class_of(fixed.states[0])
}

/// Greedy agglomerative search: starting from the identity partition
/// (with the fixed set pre-merged), repeatedly merges the pair of classes
/// whose merge minimizes the relevant information loss L_{X_n}, until
/// `target_m` classes remain. Ties break on the smallest (a, b) class pair.
pub fn aib_greedy(
    x: &MarkovChain,
    target_m: usize,
    fixed: Option<&FixedClass>,
) -> Result<Partition> {
    let trace = aib_trace(x, target_m, fixed)?;
    Ok(trace.into_iter().last().expect("trace is nonempty"))
}

/// The full merge chain from the start partition down to `target_m`,
/// coarsest last. Each entry is obtained from its predecessor by exactly
/// one pair merge.
pub fn aib_trace(
    x: &MarkovChain,
    target_m: usize,
    fixed: Option<&FixedClass>,
) -> Result<Vec<Partition>> {
    let n = x.n();
    if target_m < 1 || target_m > n {
        return Err(Error::BadTarget { target: target_m, n });
    }
    let mut current = initial_partition(n, fixed)?;
    if current.m() < target_m {
        return Err(Error::BadTarget { target: target_m, n: current.m() });
    }
    let mut trace = vec![current.clone()];
    while current.m() > target_m {
        let frozen = match fixed {
            Some(f) if !f.mergeable => Some(fixed_class_index(&current, f)),
            _ => None,
        };
        let mut best: Option<(f64, usize, usize, Partition)> = None;
        for a in 0..current.m() {
            for b in (a + 1)..current.m() {
                if frozen == Some(a) || frozen == Some(b) {
                    continue;
                }
                let candidate = current.merge_classes(a, b);
                let loss = relevant_loss_x(x, &candidate).loss;
                // pairs are visited in lexicographic order, so strict
                // improvement keeps the smallest (a, b) on ties
                if best.as_ref().map_or(true, |(best_loss, ..)| loss < *best_loss) {
                    best = Some((loss, a, b, candidate));
                }
            }
        }
        let (_, _, _, merged) = best.expect("at least one mergeable pair");
        current = merged;
        trace.push(current.clone());
    }
    Ok(trace)
}

/// Result of an exhaustive search.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: Partition,
    pub value: f64,
}

/// Evaluates the criterion on every canonical m-class partition and returns
/// the minimizer; ties break on enumeration order.
pub fn exhaustive_search(
    x: &MarkovChain,
    m: usize,
    criterion: Criterion,
    fixed: Option<&FixedClass>,
) -> Result<SearchResult> {
    let n = x.n();
    if let Some(f) = fixed {
        validate_fixed(f, n)?;
    }
    let fixed_states = fixed.map(|f| f.states.as_slice());
    let mut best: Option<SearchResult> = None;
    for g in enumerate_partitions(n, m, fixed_states)? {
        let value = match criterion {
            Criterion::LossX => relevant_loss_x(x, &g).loss,
            Criterion::PLiftKldr => {
                let lifted = crate::info::p_lift_of(x, &g)?;
                crate::info::kldr_markov(x, lifted.kernel())?
            }
        };
        if best.as_ref().map_or(true, |b| value < b.value) {
            best = Some(SearchResult { best: g, value });
        }
    }
    best.ok_or(Error::BadTarget { target: m, n })
}

/// Which search drives a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMethod {
    Aib,
    Exhaustive,
}

/// Evaluates one record per class count m in `m_from ..= m_to` (descending).
/// The AIB sweep reuses a single agglomeration run, so its partitions are
/// nested.
pub fn sweep(
    x: &MarkovChain,
    m_from: usize,
    m_to: usize,
    method: SweepMethod,
    fixed: Option<&FixedClass>,
    tol: f64,
) -> Result<Vec<SweepRecord>> {
    assert!(m_to >= 1 && m_to <= m_from && m_from <= x.n(), "bad sweep range");
    let mut records = Vec::new();
    match method {
        SweepMethod::Aib => {
            let trace = aib_trace(x, m_to, fixed)?;
            for g in trace {
                if g.m() > m_from {
                    continue;
                }
                records.push(record_for(x, g, tol)?);
            }
        }
        SweepMethod::Exhaustive => {
            for m in (m_to..=m_from).rev() {
                let found = exhaustive_search(x, m, Criterion::PLiftKldr, fixed)?;
                records.push(record_for(x, found.best, tol)?);
            }
        }
    }
    Ok(records)
}

fn record_for(x: &MarkovChain, g: Partition, tol: f64) -> Result<SweepRecord> {
    let report = evaluate(x, &g, tol)?;
    debug_assert!(report.kldr_p <= report.kldr_mu + 1e-12);
    Ok(SweepRecord {
        m: g.m(),
        partition: g,
        kldr_p: report.kldr_p,
        kldr_mu: report.kldr_mu,
        loss_x: report.loss_x,
        lumpable: report.lumpable,
    })
}

/// Indices into `records` at which kldr_p is a strict local minimum
/// (smaller than both neighbors). Endpoints are never flagged.
pub fn strict_local_minima(records: &[SweepRecord]) -> Vec<usize> {
    (1..records.len().saturating_sub(1))
        .filter(|&i| {
            records[i].kldr_p < records[i - 1].kldr_p
                && records[i].kldr_p < records[i + 1].kldr_p
        })
        .collect()
}
