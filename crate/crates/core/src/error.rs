use thiserror::Error;

/// Errors raised by the simulation, estimation and search layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("gate is not unitary (deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("Kraus set is not trace preserving (deviation {deviation:.3e})")]
    IncompleteKraus { deviation: f64 },

    #[error("invalid qubit index: {0}")]
    InvalidQubit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension cap exceeded: {needed} > {cap}")]
    CapExceeded { needed: usize, cap: usize },

    #[error("linear system is singular or ill-conditioned: {0}")]
    Singular(String),

    #[error("infeasible domain: {0}")]
    InfeasibleDomain(String),

    #[error("polynomial self-check failed: {0}")]
    SelfCheck(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
