use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument is outside the supported range.
    #[error("out of range: {0}")]
    Range(String),

    /// Arguments are individually fine but do not fit together.
    #[error("invalid parameters: {0}")]
    Parameter(String),

    /// A size cap was exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Input violates a structural condition (set-pair system, family system).
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("corrupt distance cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for errors caused by caps rather than by bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}
