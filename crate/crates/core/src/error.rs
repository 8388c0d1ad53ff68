use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("length mismatch: {left} bits vs {right} bits")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance too large for exact computation: {0}")]
    TooLarge(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("no code reached the target distance after {attempts} attempts (best distance {best})")]
    RetryBudgetExhausted { attempts: usize, best: usize },

    #[error("string is not a codeword")]
    NotACodeword,

    #[error("string does not lie in the expected coset")]
    SyndromeMismatch,

    #[error("distribution has zero total mass")]
    ZeroMass,

    #[error("smoothing radius {eps} reaches the total mass {mass}; entropy is unbounded")]
    SmoothingTooLarge { eps: f64, mass: f64 },

    #[error("adversarial channel has not been certified against the entropy constraint")]
    Uncertified,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
