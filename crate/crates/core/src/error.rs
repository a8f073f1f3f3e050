use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller passed a value outside the operation's domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Scenario, topology or parameter set cannot be built.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("trace parse error at line {line}: {field}: {message}")]
    Parse {
        line: usize,
        field: &'static str,
        message: String,
    },

    /// A TCP endpoint observed something its peer can never produce.
    #[error("protocol violation: {0}")]
    Protocol(String),

    /// A simulator invariant was broken during a run.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant(_) | Error::Protocol(_))
    }
}
