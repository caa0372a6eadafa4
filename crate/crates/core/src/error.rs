use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomedError {
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("rank-one surrogate is singular (minimum eigenvalue estimate is zero)")]
    SingularSurrogate,
    #[error("outer iteration cap {cap} exceeded (schedule needs {needed})")]
    IterationCap { cap: usize, needed: usize },
    #[error("reference solver failed: {0}")]
    Oracle(String),
}

pub type Result<T> = std::result::Result<T, GeomedError>;
