use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: shape requires {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value {value} at flat position {position}")]
    NonFinite { position: usize, value: f64 },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("validation error: {0}")]
    Validation(String),

    /// A ratio sigma_x / sigma_y was needed where sigma_y vanishes.
    #[error("rank mismatch in mode {mode}: {detail}")]
    RankMismatch { mode: usize, detail: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("degenerate spectrum in mode {mode} at indices {indices:?}: {detail}")]
    Degeneracy {
        mode: usize,
        indices: Vec<usize>,
        detail: String,
    },

    #[error("parse error in {source_name} at line {line}, column {column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(source_name: &str, err: &serde_json::Error) -> Self {
        Error::Parse {
            source_name: source_name.to_owned(),
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
