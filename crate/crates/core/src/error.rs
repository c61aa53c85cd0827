use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SketchError>;

/// Errors raised by the sketching library and the command-line tool.
///
/// Each variant maps onto one of the process exit codes via
/// [`SketchError::exit_code`].
#[derive(Debug, Error)]
pub enum SketchError {
    /// Invalid arguments, mismatched sizes or stale indices.
    #[error("usage error: {0}")]
    Usage(String),

    /// The input file could not be opened or read.
    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed tabular input (ragged rows, bad header, name collisions).
    #[error("data error at {location}: {message}")]
    Data { location: String, message: String },

    /// A missing or non-finite value where the policy forbids one.
    #[error("non-finite or missing value at row {row}, column {column:?}")]
    NonFinite { row: usize, column: String },

    /// Input that makes a sketcher's objective undefined.
    #[error("degenerate input in {module}: {condition}")]
    Degenerate {
        module: &'static str,
        condition: String,
    },

    /// Numerical failure or a violated invariant.
    #[error("numeric error in {module}: {message}")]
    Numeric {
        module: &'static str,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl SketchError {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        SketchError::Usage(msg.into())
    }

    /// Process exit code: 2 usage, 3 data, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            SketchError::Usage(_) | SketchError::Unreadable { .. } => 2,
            SketchError::Data { .. }
            | SketchError::Degenerate { .. }
            | SketchError::Csv(_)
            | SketchError::Json(_)
            | SketchError::Io(_) => 3,
            SketchError::NonFinite { .. } | SketchError::Numeric { .. } => 4,
        }
    }
}
