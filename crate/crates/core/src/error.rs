use thiserror::Error;

/// Failure modes shared by every construction in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or inconsistent caller input (bad dimensions, missing values, ...).
    #[error("input error: {0}")]
    Input(String),
    /// The object is well formed but lacks a structural property the operation needs.
    #[error("structural error: {0}")]
    Structural(String),
    /// An enumeration would exceed the configured cap.
    #[error("resource limit: {0}")]
    Resource(String),
    /// A conditional or ratio is undefined because its denominator vanishes.
    #[error("undefined: {0}")]
    Undefined(String),
    /// An internal audit failed. This always indicates a bug.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn structural<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Structural(msg.into()))
}

pub(crate) fn resource<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Resource(msg.into()))
}
