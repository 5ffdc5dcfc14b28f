use alloc::string::String;
use core::fmt;

/// Errors reported by the spectroscopy core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a precondition (dimension mismatch, bad index,
    /// missing map entry, ...).
    Argument(String),
    /// A scenario or table was configured inconsistently.
    Config(String),
    /// A numerical procedure failed to converge; carries diagnostics.
    Numerical(String),
    /// A linear system was singular; carries the estimated null-space
    /// dimension.
    Singular { null_dim: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Argument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Error::Singular { null_dim } => {
                write!(f, "singular system (estimated null-space dimension {null_dim})")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
