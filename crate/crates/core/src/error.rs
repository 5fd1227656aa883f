use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty diagram")]
    EmptyDiagram,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("exact volume only in 2-D (got dimension {0})")]
    NotTwoDimensional(usize),

    #[error("invalid bounding box: {0}")]
    InvalidBox(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty dataset")]
    EmptyDataset,

    #[error("individual {0} has not been evaluated")]
    Unevaluated(usize),

    #[error("empty population")]
    EmptyPopulation,

    #[error("objective vectors have different lengths ({0} vs {1})")]
    ObjectiveLength(usize, usize),

    #[error("training set needs {0}")]
    MissingClass(&'static str),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unequal run counts for dataset `{dataset}`: {detail}")]
    UnequalRuns { dataset: String, detail: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
