//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by any toolkit operation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violates an operation's contract (even window, negative
    /// extinction coefficient, horizon outside the image, ...).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Two rasters or maps that must share dimensions do not.
    #[error("dimension mismatch: {0}")]
    UnmatchedShape(String),

    /// Malformed annotation text. Line numbers are 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A depth file could not be ingested (unsupported format, negative or
    /// non-finite samples, size mismatch with the paired image).
    #[error("depth ingestion failed for {path}: {message}")]
    DepthIngest { path: PathBuf, message: String },

    /// Evaluation inputs are inconsistent (e.g. a prediction keyed to an
    /// image absent from the ground truth).
    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image codec error on {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: ::image::ImageError,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn image(path: impl Into<PathBuf>, source: ::image::ImageError) -> Self {
        Error::Image {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
