use thiserror::Error;

/// Errors produced by the linear algebra kernels, residual assemblers and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LcpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix is singular (pivot {pivot:e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("smoothing parameter must be positive, got r = {0}")]
    NonPositiveR(f64),

    #[error("strict complementarity violated at index {index} (x + z = {sum:e})")]
    StrictComplementarityViolated { index: usize, sum: f64 },

    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),

    #[error("line search failed after {0} backtracks")]
    LineSearchFailed(usize),

    #[error("invalid option: {0}")]
    InvalidOptions(String),

    #[error("empty input vector")]
    EmptyVector,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LcpError>;
