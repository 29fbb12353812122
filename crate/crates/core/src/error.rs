use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A structurally malformed value, e.g. a non-canonical continued fraction.
    #[error("validation error: {0}")]
    Validation(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// Synthesis could not meet the requested budget within configured limits.
    #[error("synthesis infeasible: {0}")]
    Infeasible(String),
    /// The value exists but is too large to materialise.
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("arithmetic failure: {0}")]
    Arithmetic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
