use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unknown cell id `{0}`")]
    UnknownCell(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("internal invariant breach: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn pre<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
