use thiserror::Error;

/// Errors surfaced by constructors and operations.
///
/// `Structural` means the input data does not even parse into the domain
/// model (dangling references, partial maps, duplicates). `Argument` means
/// the data is well formed but violates an operation precondition.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("argument error: {0}")]
    Argument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
