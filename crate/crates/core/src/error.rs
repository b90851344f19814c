use thiserror::Error;

/// Errors raised by sampling, construction and estimation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate window: {0}")]
    DegenerateWindow(String),

    #[error("point outside the open unit ball (euclidean norm {0})")]
    OutsideUnitBall(f64),

    #[error("duplicate order key shared by vertices {0} and {1}")]
    DuplicateOrderKey(usize, usize),

    #[error("retained index {index} is not in 1..={len}")]
    RetainedOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("too few samples: {got} (minimum {min})")]
    TooFewSamples { got: usize, min: usize },

    #[error("index range violation: {0}")]
    IndexRange(String),

    #[error("integral does not converge: {0}")]
    Divergent(String),

    #[error("functional has zero variance")]
    ZeroVariance,

    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
