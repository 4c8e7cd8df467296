use thiserror::Error;

/// Errors produced by chain construction, partition handling and the
/// information-theoretic operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("row {row} sums to {sum}, expected 1")]
    RowSumViolation { row: usize, sum: f64 },
    #[error("row {row} is all zeros and cannot be renormalized")]
    ZeroRow { row: usize },
    #[error("matrix is not square: {rows} rows, row {row} has {cols} columns")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("stationary distribution iteration did not converge within {budget} iterations")]
    NotConverged { budget: usize },
    #[error("transition matrix is not regular (irreducible and aperiodic)")]
    NotRegular,
    #[error("class label {label} has no members")]
    EmptyClass { label: usize },
    #[error("pi must be strictly positive (entry {index} is {value})")]
    NonPositivePi { index: usize, value: f64 },
    #[error("alphabet size {n} exceeds the enumeration cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("fixed set is empty or references states outside 1..={n}")]
    InvalidFixedSet { n: usize },
    #[error("absolute continuity violated: P'[{i}][{j}] = 0 but P[{i}][{j}] = {p} > 0")]
    AbsoluteContinuityViolation { i: usize, j: usize, p: f64 },
    #[error("m^n = {count} projected sequences exceed the enumeration bound {bound}")]
    TooManySequences { count: u128, bound: u128 },
    #[error("target class count {target} is outside 1..={n}")]
    BadTarget { target: usize, n: usize },
    #[error("supplied aggregated chain does not match aggregate(X, g) (max deviation {deviation})")]
    AggregationMismatch { deviation: f64 },
    #[error("reachable state space exceeds the cap of {cap} states")]
    StateSpaceExceeded { cap: usize },
    #[error("transition target {target:?} missing from the state list")]
    TargetNotInStateList { target: Vec<u64> },
    #[error("uniformization constant {lambda} is below max |R_ii| = {required}")]
    LambdaTooSmall { lambda: f64, required: f64 },
    #[error("distribution entry {index} is {value}, expected non-negative")]
    NegativeProbability { index: usize, value: f64 },
    #[error("distribution sums to {sum}, expected 1")]
    DistributionSumViolation { sum: f64 },
    #[error("mu is not stationary for P (max residual {residual})")]
    NotStationary { residual: f64 },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
