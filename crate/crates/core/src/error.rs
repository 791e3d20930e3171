use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A well-formed request has no valid answer (e.g. an empty preimage).
    #[error("domain error: {0}")]
    Domain(String),
    /// A protocol message arrived out of phase or could not be interpreted.
    #[error("protocol error: {0}")]
    Protocol(String),
    /// Wire framing failure.
    #[error("frame error: {0}")]
    Frame(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
