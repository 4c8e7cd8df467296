//! C ABI over the markov-agg library: opaque handles, integer status codes,
//! and a thread-local last-error message. The companion header is generated
//! by cbindgen at build time (see `include/markov_agg.h`).

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::ptr;

use markov_agg::{
    aggregate, aib_greedy, evaluate, exhaustive_search, lumpability_check, p_lift, pi_lift,
    Criterion, Error, FixedClass, MarkovChain, Partition, StochasticMatrix,
};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagStatus {
    Ok = 0,
    /// Computation failed (non-regular chain, no convergence, ...).
    ComputationError = 1,
    /// Invalid input (bad dimensions, row sums, labels, null pointers, ...).
    InvalidInput = 2,
    /// A resource cap was exceeded.
    ResourceLimit = 3,
}

/// Opaque handle to a validated regular Markov chain.
pub struct MagChain(MarkovChain);

/// Opaque handle to a canonical state-space partition.
pub struct MagPartition(Partition);

/// Flat metric report; `lumpable` is 0 or 1.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct MagMetrics {
    pub kldr_p: f64,
    pub kldr_mu: f64,
    pub loss_x: f64,
    pub loss_y: f64,
    pub h_rate: f64,
    pub lumpable: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(err: &Error) -> MagStatus {
    match err {
        Error::TooLarge { .. }
        | Error::TooManySequences { .. }
        | Error::StateSpaceExceeded { .. } => MagStatus::ResourceLimit,
        Error::NotConverged { .. }
        | Error::NotRegular
        | Error::AbsoluteContinuityViolation { .. }
        | Error::AggregationMismatch { .. }
        | Error::TargetNotInStateList { .. } => MagStatus::ComputationError,
        _ => MagStatus::InvalidInput,
    }
}

fn fail(err: Error) -> MagStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

fn invalid(message: &str) -> MagStatus {
    set_error(message.to_string());
    MagStatus::InvalidInput
}

/// Message describing the most recent error on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mag_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow().as_ref().map_or(ptr::null(), |message| message.as_ptr())
    })
}

/// Builds a chain from a row-major `n x n` transition matrix.
///
/// # Safety
/// `entries` must point to `n * n` readable doubles and `out` to a writable
/// pointer slot.
#[no_mangle]
pub unsafe extern "C" fn mag_chain_new(
    entries: *const f64,
    n: usize,
    out: *mut *mut MagChain,
) -> MagStatus {
    if entries.is_null() || out.is_null() || n == 0 {
        return invalid("null pointer or zero dimension");
    }
    let flat = std::slice::from_raw_parts(entries, n * n);
    let rows: Vec<Vec<f64>> = flat.chunks(n).map(|r| r.to_vec()).collect();
    let chain = match StochasticMatrix::new(rows, false).and_then(MarkovChain::new) {
        Ok(chain) => chain,
        Err(err) => return fail(err),
    };
    *out = Box::into_raw(Box::new(MagChain(chain)));
    MagStatus::Ok
}

/// Releases a chain handle; accepts null.
///
/// # Safety
/// `chain` must be null or a pointer returned by `mag_chain_new`.
#[no_mangle]
pub unsafe extern "C" fn mag_chain_free(chain: *mut MagChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Number of states, or 0 for a null handle.
///
/// # Safety
/// `chain` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn mag_chain_dim(chain: *const MagChain) -> usize {
    chain.as_ref().map_or(0, |c| c.0.n())
}

/// Copies the stationary distribution into `out` (length `n`).
///
/// # Safety
/// `chain` must be a valid handle and `out` writable for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn mag_chain_stationary(
    chain: *const MagChain,
    out: *mut f64,
) -> MagStatus {
    let Some(chain) = chain.as_ref() else { return invalid("null chain") };
    if out.is_null() {
        return invalid("null output buffer");
    }
    let mu = chain.0.mu().entries();
    std::slice::from_raw_parts_mut(out, mu.len()).copy_from_slice(mu);
    MagStatus::Ok
}

/// Builds a partition from `n` 1-based class labels (canonicalized).
///
/// # Safety
/// `labels` must point to `n` readable values and `out` to a writable slot.
#[no_mangle]
pub unsafe extern "C" fn mag_partition_new(
    labels: *const usize,
    n: usize,
    out: *mut *mut MagPartition,
) -> MagStatus {
    if labels.is_null() || out.is_null() || n == 0 {
        return invalid("null pointer or zero length");
    }
    let raw = std::slice::from_raw_parts(labels, n);
    let partition = match Partition::canonicalize(raw) {
        Ok(partition) => partition,
        Err(err) => return fail(err),
    };
    *out = Box::into_raw(Box::new(MagPartition(partition)));
    MagStatus::Ok
}

/// Releases a partition handle; accepts null.
///
/// # Safety
/// `partition` must be null or a pointer returned by this library.
#[no_mangle]
pub unsafe extern "C" fn mag_partition_free(partition: *mut MagPartition) {
    if !partition.is_null() {
        drop(Box::from_raw(partition));
    }
}

/// Number of classes, or 0 for a null handle.
///
/// # Safety
/// `partition` must be null or a valid handle.
#[no_mangle]
pub unsafe extern "C" fn mag_partition_num_classes(partition: *const MagPartition) -> usize {
    partition.as_ref().map_or(0, |p| p.0.m())
}

/// Copies the canonical 1-based labels into `out` (length `n`).
///
/// # Safety
/// `partition` must be a valid handle and `out` writable for `n` values.
#[no_mangle]
pub unsafe extern "C" fn mag_partition_labels(
    partition: *const MagPartition,
    out: *mut usize,
) -> MagStatus {
    let Some(partition) = partition.as_ref() else { return invalid("null partition") };
    if out.is_null() {
        return invalid("null output buffer");
    }
    let labels = partition.0.assignment();
    std::slice::from_raw_parts_mut(out, labels.len()).copy_from_slice(labels);
    MagStatus::Ok
}

fn check_sizes(chain: &MagChain, partition: &MagPartition) -> Result<(), MagStatus> {
    if chain.0.n() != partition.0.n() {
        return Err(invalid("partition length does not match chain dimension"));
    }
    Ok(())
}

/// Evaluates all divergence bounds and information losses for a partition.
///
/// # Safety
/// Handles must be valid and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mag_evaluate(
    chain: *const MagChain,
    partition: *const MagPartition,
    tol: f64,
    out: *mut MagMetrics,
) -> MagStatus {
    let (Some(chain), Some(partition)) = (chain.as_ref(), partition.as_ref()) else {
        return invalid("null handle");
    };
    if out.is_null() {
        return invalid("null output");
    }
    if let Err(status) = check_sizes(chain, partition) {
        return status;
    }
    match evaluate(&chain.0, &partition.0, tol) {
        Ok(report) => {
            *out = MagMetrics {
                kldr_p: report.kldr_p,
                kldr_mu: report.kldr_mu,
                loss_x: report.loss_x,
                loss_y: report.loss_y,
                h_rate: report.h_rate,
                lumpable: report.lumpable as u8,
            };
            MagStatus::Ok
        }
        Err(err) => fail(err),
    }
}

/// Writes a lifted `n x n` kernel into `out` (row-major). `use_p_lift`
/// selects the transition-profile lifting; otherwise the stationary lifting.
///
/// # Safety
/// Handles must be valid and `out` writable for `n * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn mag_lift(
    chain: *const MagChain,
    partition: *const MagPartition,
    use_p_lift: u8,
    out: *mut f64,
) -> MagStatus {
    let (Some(chain), Some(partition)) = (chain.as_ref(), partition.as_ref()) else {
        return invalid("null handle");
    };
    if out.is_null() {
        return invalid("null output");
    }
    if let Err(status) = check_sizes(chain, partition) {
        return status;
    }
    let y = aggregate(&chain.0, &partition.0);
    let lifted = if use_p_lift != 0 {
        p_lift(&chain.0, &y, &partition.0)
    } else {
        pi_lift(&y, &partition.0, chain.0.mu())
    };
    match lifted {
        Ok(lifted) => {
            let n = chain.0.n();
            let dst = std::slice::from_raw_parts_mut(out, n * n);
            for (i, row) in lifted.kernel().rows().enumerate() {
                dst[i * n..(i + 1) * n].copy_from_slice(row);
            }
            MagStatus::Ok
        }
        Err(err) => fail(err),
    }
}

/// Strong lumpability check; writes 0/1 to `lumpable` and the largest
/// within-class row deviation to `max_violation`.
///
/// # Safety
/// Handles must be valid; output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn mag_lumpability_check(
    chain: *const MagChain,
    partition: *const MagPartition,
    tol: f64,
    lumpable: *mut u8,
    max_violation: *mut f64,
) -> MagStatus {
    let (Some(chain), Some(partition)) = (chain.as_ref(), partition.as_ref()) else {
        return invalid("null handle");
    };
    if lumpable.is_null() || max_violation.is_null() {
        return invalid("null output");
    }
    if let Err(status) = check_sizes(chain, partition) {
        return status;
    }
    let report = lumpability_check(chain.0.p(), &partition.0, tol);
    *lumpable = report.lumpable as u8;
    *max_violation = report.max_violation;
    MagStatus::Ok
}

/// Greedy agglomerative search down to `m` classes. An optional fixed class
/// is given as 0-based state indices (`fixed` may be null when empty).
///
/// # Safety
/// `chain` must be valid; `fixed` must point to `fixed_len` readable values
/// when non-null; `out` must be a writable slot.
#[no_mangle]
pub unsafe extern "C" fn mag_search_greedy(
    chain: *const MagChain,
    m: usize,
    fixed: *const usize,
    fixed_len: usize,
    out: *mut *mut MagPartition,
) -> MagStatus {
    let Some(chain) = chain.as_ref() else { return invalid("null chain") };
    if out.is_null() || (fixed.is_null() && fixed_len > 0) {
        return invalid("null output or fixed set");
    }
    let fixed = if fixed_len == 0 {
        None
    } else {
        Some(FixedClass::frozen(std::slice::from_raw_parts(fixed, fixed_len).to_vec()))
    };
    match aib_greedy(&chain.0, m, fixed.as_ref()) {
        Ok(partition) => {
            *out = Box::into_raw(Box::new(MagPartition(partition)));
            MagStatus::Ok
        }
        Err(err) => fail(err),
    }
}

/// Exhaustive search over all canonical `m`-class partitions, minimizing the
/// transition-profile bound (`criterion` = 0) or the relevant information
/// loss (`criterion` = 1). Writes the achieved value to `value`.
///
/// # Safety
/// `chain` must be valid; `out` and `value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mag_search_exhaustive(
    chain: *const MagChain,
    m: usize,
    criterion: u32,
    out: *mut *mut MagPartition,
    value: *mut f64,
) -> MagStatus {
    let Some(chain) = chain.as_ref() else { return invalid("null chain") };
    if out.is_null() || value.is_null() {
        return invalid("null output");
    }
    let criterion = match criterion {
        0 => Criterion::PLiftKldr,
        1 => Criterion::LossX,
        _ => return invalid("unknown criterion"),
    };
    match exhaustive_search(&chain.0, m, criterion, None) {
        Ok(result) => {
            *out = Box::into_raw(Box::new(MagPartition(result.best)));
            *value = result.value;
            MagStatus::Ok
        }
        Err(err) => fail(err),
    }
}
