use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The effective channel `H·F` is (numerically) rank deficient.
    #[error("effective channel is singular on stream {stream} (condition number {condition:e})")]
    Singular { stream: usize, condition: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("visibility window is empty")]
    EmptyWindow,

    #[error("coding gain fit failed: {0}")]
    Fit(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("mapping is not a partition of the packet set: {0}")]
    NonPartition(String),

    #[error("trace too short: need {needed} packets, have {available}")]
    TraceTooShort { needed: usize, available: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
