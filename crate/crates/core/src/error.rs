use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },

    #[error("data length {len} does not match {width}x{height}")]
    DataLength { width: usize, height: usize, len: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A metric is mathematically undefined for its input (constant map,
    /// empty distribution, no fixations). Evaluation records it as a skip.
    #[error("undefined score: {0}")]
    UndefinedScore(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot decode {}: {message}", path.display())]
    Decode { path: PathBuf, message: String },

    #[error("unsupported image format for {}: only PNG and JPEG are accepted", path.display())]
    UnsupportedFormat { path: PathBuf },

    #[error("{}:{line}: {message}", path.display())]
    Csv { path: PathBuf, line: u64, message: String },

    #[error("fixation ({x}, {y}) outside {width}x{height} stimulus in {}", path.display())]
    FixationOutOfBounds {
        path: PathBuf,
        x: i64,
        y: i64,
        width: usize,
        height: usize,
    },

    #[error("dataset: {0}")]
    Dataset(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors that mark a score as undefined rather than a failure.
    pub fn is_skip(&self) -> bool {
        matches!(self, Error::UndefinedScore(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
