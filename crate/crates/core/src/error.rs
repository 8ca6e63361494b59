use thiserror::Error;

/// Errors raised across the lab.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity exceeded: {what} needs {required}, limit is {limit}")]
    Capacity {
        what: String,
        required: u128,
        limit: u128,
    },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        LabError::Dimension(msg.into())
    }

    pub(crate) fn capacity(what: impl Into<String>, required: u128, limit: u128) -> Self {
        LabError::Capacity {
            what: what.into(),
            required,
            limit,
        }
    }
}
