use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structurally invalid input data; `path` locates the offending field.
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },

    /// Value outside a tabulated range.
    #[error("range error: {0}")]
    Range(String),

    /// A numerical procedure failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// A configured physical constraint was violated.
    #[error("constraint violation: {0}")]
    Constraint(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
