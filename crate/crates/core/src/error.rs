//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A caller violated a documented precondition (e.g. disconnected input
    /// where a connected graph is required).
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("computation failed: {0}")]
    Computation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
