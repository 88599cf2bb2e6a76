use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Inputs violate a parameter contract (field mismatch, out-of-range index, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("division by zero")]
    DivisionByZero,

    /// A toy layout or a bounded scheme ran out of room.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// Reconstruction produced inconsistent intermediate values.
    #[error("verification failed: {0}")]
    Verification(String),

    /// An exhaustive computation was asked for at a size it will not attempt.
    #[error("refused: {0}")]
    Refused(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
