use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
///
/// The variants fall into two groups the CLI maps to different exit codes:
/// `Validation` for bad configuration or arguments, everything else for
/// problems with the data being processed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph {id}: {message}")]
    Graph { id: String, message: String },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("missing id {0:?}")]
    MissingId(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("{0}")]
    Data(String),

    #[error("ensemble member {index}: {source}")]
    Member {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for configuration / argument problems (as opposed to bad data).
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Validation(_) => true,
            Error::Member { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
