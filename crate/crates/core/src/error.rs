use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto exit codes:
/// parse/validation 2, budget 3, unsupported combination 4.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("invalid allocation: {0}")]
    InvalidAllocation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("budget exceeded: requires {required} candidates, cap is {cap}")]
    Budget { required: u128, cap: u128 },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
