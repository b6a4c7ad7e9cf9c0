use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the optimization library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    /// A malformed cell in a returns or carbon file. Rows are 1-based data rows
    /// (the header is not counted), columns are 1-based.
    #[error("row {row}, column {column}: {message}")]
    Cell {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("insufficient data: need at least {required} observations, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error("dimension mismatch for {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("carbon score {value} of asset {asset} outside valid range [{lo}, {hi}]")]
    CarbonOutOfRange {
        asset: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("asset id mismatch: {0}")]
    AssetMismatch(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("infeasible bounds: {0}")]
    InfeasibleBounds(String),

    #[error("invalid portfolio: {0}")]
    InvalidPortfolio(String),

    #[error("non-finite objective value: {0}")]
    NonFinite(String),

    #[error("outside the domain of epsilon-dominance (components must be positive): {0}")]
    NonPositive(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("archive is empty")]
    EmptyArchive,

    #[error("region of interest is empty: aspirations infeasible on this front")]
    EmptyRegion,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid front export: {0}")]
    InvalidFront(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
