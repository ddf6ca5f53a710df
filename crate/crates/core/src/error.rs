use thiserror::Error;

/// Errors raised by the library.
///
/// Every variant names the invariant that failed so callers (the CLI in
/// particular) can surface a one-line diagnostic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-monotone values: {0}")]
    NonMonotone(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("pushforward is not absolutely continuous: zero slope on [{lo}, {hi}] carrying density {density}")]
    SingularPushforward { lo: f64, hi: f64, density: f64 },

    #[error("too many atoms: {got} exceeds the limit of {max}")]
    TooLarge { got: usize, max: usize },

    #[error("expected an atomic measure")]
    NotAtomic,

    #[error("shape mismatch: expected {expected} coordinates, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("point {0} is not a partition point")]
    PartitionMismatch(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
