use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A group type/rank outside the supported table.
    #[error("unsupported group {label}: {bound}")]
    Unsupported { label: String, bound: String },

    /// A parameter outside the domain of an operation (x = 0, mismatched supports, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation that does not apply to the given input (non-crystallographic group, even k, ...).
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// An enumeration cap was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// An identity that must hold exactly did not.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
