use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid group spec `{spec}`: {reason}")]
    GroupSpec { spec: String, reason: String },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("group order {order} exceeds the vertex cap of {cap}")]
    Capacity { order: u64, cap: u64 },

    /// An input outside the domain an operation is defined on (mixed primes,
    /// non-tree input, non-universal vertex, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("certificate schema error at {path}: {message}")]
    Schema { path: String, message: String },

    /// A constructive step produced something that failed its own check.
    /// Seeing this means there is a bug, not bad input.
    #[error("construction failed: {0}")]
    Construction(String),

    #[error("search inconclusive: {0}")]
    Inconclusive(String),
}

impl Error {
    pub(crate) fn spec(spec: &str, reason: impl Into<String>) -> Self {
        Error::GroupSpec {
            spec: spec.to_owned(),
            reason: reason.into(),
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
