use std::path::PathBuf;

/// Errors produced by the analysis pipeline.
///
/// Each variant maps onto a distinct CLI exit code (see [`Error::exit_code`]).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("column `{0}` not present in CSV header")]
    MissingColumn(String),

    #[error("time column is not strictly increasing at row {row}")]
    NonMonotoneTime { row: usize },

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },

    #[error("non-finite value at row {row}")]
    NonFinite { row: usize },

    #[error(
        "non-uniform sampling: interval {interval} deviates from median {median} by more than {tolerance_pct}%; resample first"
    )]
    NonUniform {
        interval: f64,
        median: f64,
        tolerance_pct: f64,
    },

    #[error("series time ranges do not overlap")]
    EmptyOverlap,

    #[error("series mismatch: {0}")]
    Mismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported basis for this operation: {0}")]
    UnsupportedBasis(String),

    #[error("scale cut-off removes every scale (N = {n})")]
    EmptyGrid { n: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingFile(_) => "missing_file",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::MissingColumn(_) => "missing_column",
            Error::NonMonotoneTime { .. } => "non_monotone_time",
            Error::TooFewSamples { .. } => "too_few_samples",
            Error::NonFinite { .. } => "non_finite",
            Error::NonUniform { .. } => "non_uniform",
            Error::EmptyOverlap => "empty_overlap",
            Error::Mismatch(_) => "mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnsupportedBasis(_) => "unsupported_basis",
            Error::EmptyGrid { .. } => "empty_grid",
            Error::Empty(_) => "empty",
            Error::Json(_) => "json",
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 2,
            Error::MissingFile(_) => 3,
            Error::Io(_) => 4,
            Error::Csv(_) => 5,
            Error::MissingColumn(_) => 6,
            Error::NonMonotoneTime { .. } => 7,
            Error::TooFewSamples { .. } => 8,
            Error::NonFinite { .. } => 9,
            Error::NonUniform { .. } => 10,
            Error::EmptyOverlap => 11,
            Error::Mismatch(_) => 12,
            Error::UnsupportedBasis(_) => 13,
            Error::EmptyGrid { .. } => 14,
            Error::Empty(_) => 15,
            Error::Json(_) => 16,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
