use std::fmt;

use thiserror::Error;

/// Why a matrix was rejected as a density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvalidReason {
    NonHermitian,
    TraceNotOne,
    NotPsd,
}

impl InvalidReason {
    pub fn as_str(self) -> &'static str {
        match self {
            InvalidReason::NonHermitian => "NonHermitian",
            InvalidReason::TraceNotOne => "TraceNotOne",
            InvalidReason::NotPsd => "NotPSD",
        }
    }
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max-entry residual {residual:e})")]
    NonHermitian { residual: f64 },
    #[error("eigensolver did not converge")]
    ConvergenceFailure,
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("InvalidState({reason}): residual {residual:e}")]
    InvalidState { reason: InvalidReason, residual: f64 },
    #[error("dimension {0} exceeds the dense cap of {cap}", cap = crate::matops::MAX_DIM)]
    DimensionTooLarge(usize),
    #[error("dimension {0} is too small, need at least 2")]
    DimensionTooSmall(usize),
    #[error("Bloch vector lies outside the state body (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("Bloch vector has norm {norm} > 1")]
    BlochNormTooLarge { norm: f64 },
    #[error("Bloch vector for dimension {dim} needs {expected} coefficients, got {got}")]
    BlochLength { dim: usize, expected: usize, got: usize },
    #[error("rank {rank} is outside 1..={dim}")]
    BadRank { rank: usize, dim: usize },
    #[error("cannot build a pure state from the zero vector")]
    ZeroVector,
    #[error("expected qubit states, got dimension {0}")]
    NotQubit(usize),
    #[error("bad channel shape: {0}")]
    BadShape(String),
    #[error("channel is not trace preserving (completeness residual {residual:e})")]
    NotTracePreserving { residual: f64 },
    #[error("optimizer residual {residual:e} above tolerance {tolerance:e} after {restarts} restarts")]
    OptimizerFailure {
        residual: f64,
        tolerance: f64,
        restarts: usize,
    },
    #[error("bad config: {0}")]
    BadConfig(String),
    #[error("unknown example id {0:?}")]
    UnknownExample(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
