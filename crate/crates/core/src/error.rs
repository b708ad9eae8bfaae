use thiserror::Error;

/// Errors raised by distribution construction, transforms and checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("negative weight {value} at support point {index}")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weights sum to {0}, expected 1 within 1e-9")]
    NotNormalized(f64),

    #[error("empty weight sequence")]
    Empty,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shift by {shift} moves support point {offset} below zero")]
    NegativeSupport { offset: usize, shift: i64 },

    #[error("support reaches {max} but degree is {degree}")]
    SupportExceedsDegree { max: usize, degree: usize },

    #[error("distribution has zero mean")]
    ZeroMean,

    #[error("thinning parameter {0} outside [0, 1]")]
    AlphaOutOfRange(f64),

    #[error("mean {actual} does not match required {expected}")]
    MeanMismatch { expected: f64, actual: f64 },

    #[error("mixing distribution puts mass outside [0, 1]")]
    MixingSupportOutOfRange,

    #[error("iterated tail sums diverge")]
    DivergentTailSum,

    #[error("lower-tail bound needs t < lambda (t = {t}, lambda = {lambda})")]
    InvalidT { t: f64, lambda: f64 },

    #[error("mixing distribution must be strictly positive")]
    NonpositiveMixing,

    #[error("integrability condition fails: {0}")]
    IntegrabilityFailure(String),

    #[error("lightbulb bound needs n >= 10, got {0}")]
    InvalidN(usize),

    #[error("beta must lie in (0, 1/2], got {0}")]
    InvalidBeta(f64),

    #[error("first distribution has mass at {0} where the second has none")]
    SupportMismatch(i64),

    #[error("exact enumeration too large: {0}")]
    TooLarge(String),

    #[error("threshold {value} at position {index} outside [0, n]")]
    InvalidThreshold { index: usize, value: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
