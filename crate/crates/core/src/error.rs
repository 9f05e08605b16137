//! Error types shared across the crate.

use thiserror::Error;

/// Validation and dimension errors from the dense linear-algebra layer.
#[derive(Debug, Clone, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (max deviation {max_dev:.3e})")]
    NotHermitian { max_dev: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix dimension {dim} is not a power of two")]
    NonQubitDimension { dim: usize },
    #[error("trace deviates from one by {dev:.3e}")]
    NotUnitTrace { dev: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPositiveSemidefinite { min_eig: f64 },
    #[error("state norm deviates from one by {dev:.3e}")]
    NotNormalized { dev: f64 },
    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },
    #[error("invalid subsystem split: {0}")]
    BadSplit(String),
}

/// Errors from circuit layout construction, validation, and serialization.
#[derive(Debug, Clone, Error)]
pub enum CircuitError {
    #[error("circuit width mismatch: expected {expected} qubits, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("parameter count mismatch: layout needs {expected}, vector has {got}")]
    ParamCountMismatch { expected: usize, got: usize },
    #[error("parameter index {index} out of range for {len} parameters")]
    ParamIndexOutOfRange { index: usize, len: usize },
    #[error("invalid gate: {0}")]
    BadGate(String),
    #[error("restriction incompatible with layout: {0}")]
    BadRestriction(String),
    #[error("layout parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Invalid algorithm configuration (rounds, step sizes, signs, thresholds).
#[derive(Debug, Clone, Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

/// Top-level error for library entry points that cross module boundaries.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}
