use thiserror::Error;

/// Errors produced by matrix construction, weighting, consistency analysis
/// and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("matrix order {0} is outside the supported range 3..=15")]
    UnsupportedOrder(usize),

    #[error("entry ({i}, {j}) = {value} is not strictly positive")]
    NonPositiveEntry { i: usize, j: usize, value: f64 },

    #[error("diagonal entry ({i}, {i}) = {value} is not 1")]
    DiagonalNotOne { i: usize, value: f64 },

    #[error("entries ({i}, {j}) and ({j}, {i}) are not reciprocal (|a_ij * a_ji - 1| = {residual:e})")]
    ReciprocityViolation { i: usize, j: usize, residual: f64 },

    #[error("weight {index} = {value} is not strictly positive")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input list")]
    EmptyList,

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("left and right dominant eigenvalues disagree: {right} vs {left}")]
    EigenvalueMismatch { right: f64, left: f64 },

    #[error("no random index available for n = {0}")]
    MissingRi(usize),

    #[error("empty bin")]
    EmptyBin,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
