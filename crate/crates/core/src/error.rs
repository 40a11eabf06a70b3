use thiserror::Error;

/// Errors raised by the laboratory's operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An input violated a stated precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An enumeration would exceed its loop budget.
    #[error("budget exceeded: {0}")]
    Budget(String),
    /// A surface file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
