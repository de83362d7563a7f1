use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A bandwidth schedule fails a growth/decay condition required by the
    /// selected limit law. `conditions` lists every violated condition.
    #[error("bandwidth schedule violates {}", .conditions.join("; "))]
    BandwidthCondition { conditions: Vec<String> },

    /// An internal consistency check failed (a bug, not a user error).
    #[error("internal check failed: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
