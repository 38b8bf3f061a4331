use thiserror::Error;

/// Errors surfaced by the library. Each variant maps to a CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The input violates a standing hypothesis (not SRAE, wrong splitting, ...).
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
    /// An internal consistency check failed.
    #[error("verification failure: {0}")]
    Verification(String),
    /// The complex L-value oracle could not reach the requested accuracy.
    #[error("oracle did not converge: {0}")]
    OracleNonConvergence(String),
    /// Malformed arguments or configuration.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The requested configuration is outside what this implementation handles.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Cache could not be read or failed its checksum.
    #[error("cache error: {0}")]
    Cache(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Hypothesis(_) | Error::InvalidInput(_) | Error::Unsupported(_) => 2,
            Error::Verification(_) | Error::Cache(_) | Error::Io(_) => 3,
            Error::OracleNonConvergence(_) => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(format!("json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
