use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QssError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("projection branch has vanishing probability ({0:.3e})")]
    ZeroProbabilityBranch(f64),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("transcript contains no sifted rounds")]
    EmptySiftedSet,

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, QssError>;
