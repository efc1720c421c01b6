use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Inconsistent shapes, invalid hyperparameters, malformed requests.
    #[error("configuration error: {0}")]
    Config(String),

    /// A persisted artefact is malformed; `offset` is the byte position at
    /// which decoding failed.
    #[error("format error at byte {offset}: {msg}")]
    Format { offset: u64, msg: String },

    /// A vector with (near-)zero norm reached a normalisation step.
    #[error("degenerate vector: {0}")]
    Degenerate(String),

    /// Batch construction could not satisfy its separation constraints.
    #[error("sampling exhausted: {0}")]
    SamplingExhausted(String),

    /// Invalid query against an index.
    #[error("query error: {0}")]
    Query(String),

    /// Evaluation input does not admit the requested metric.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// Non-finite values appeared where the numerics contract forbids them.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse classification used by the CLI to select exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numeric,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::Query(_) => ErrorKind::Config,
            Error::Format { .. }
            | Error::SamplingExhausted(_)
            | Error::Evaluation(_)
            | Error::Io { .. } => ErrorKind::Data,
            Error::Degenerate(_) | Error::Numeric(_) => ErrorKind::Numeric,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
