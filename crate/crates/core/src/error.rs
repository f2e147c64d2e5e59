use thiserror::Error;

/// Errors produced by the solver, the interpolation kernel and the oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value encountered")]
    NonFiniteValue,

    #[error("invalid nodes: {0}")]
    InvalidNodes(String),

    #[error("right-hand side is not finite at t = {t}, y = {y:?}")]
    DomainViolation { t: f64, y: Vec<f64> },

    #[error("t = {t} lies outside [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("step {step:e} at x = {x} is below the minimum {min:e}")]
    StepTooSmall { x: f64, step: f64, min: f64 },

    #[error("step limit of {0} exceeded")]
    MaxStepsExceeded(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("oracle failure: {0}")]
    OracleFailure(String),
}

impl Error {
    /// Stable machine-readable name, used by the command-line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFiniteValue => "NonFiniteValue",
            Error::InvalidNodes(_) => "InvalidNodes",
            Error::DomainViolation { .. } => "DomainViolation",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::StepTooSmall { .. } => "StepTooSmall",
            Error::MaxStepsExceeded(_) => "MaxStepsExceeded",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::OracleFailure(_) => "OracleFailure",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
