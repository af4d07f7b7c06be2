use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: invalid XML: {message}")]
    Xml { path: PathBuf, message: String },

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("unknown PTB tag {0:?}")]
    UnknownPtbTag(String),

    #[error("unknown UPOS tag {0:?}")]
    UnknownUpos(String),

    #[error("user {0:?} appears in both groups")]
    ConflictingLabel(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("model format: {0}")]
    ModelFormat(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Short machine-readable category, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Xml { .. } => "xml",
            Error::UnknownLabel(_) => "unknown_label",
            Error::UnknownPtbTag(_) => "unknown_ptb_tag",
            Error::UnknownUpos(_) => "unknown_upos",
            Error::ConflictingLabel(_) => "conflicting_label",
            Error::InvalidInput(_) => "invalid_input",
            Error::InsufficientData(_) => "insufficient_data",
            Error::ModelFormat(_) => "model_format",
        }
    }
}
