use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("missing required column `{0}`")]
    MissingColumn(String),

    #[error("row {row}: {message}")]
    InvalidRow { row: usize, message: String },

    #[error("row {row}: duplicate date {date}")]
    DuplicateDate { row: usize, date: chrono::NaiveDate },

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("series too short: need {needed} values, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("constant series: {0}")]
    Constant(&'static str),

    #[error("differencing seeds inconsistent: order {order}, {seeds} seeds")]
    SeedMismatch { order: usize, seeds: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rank-deficient regressor matrix (column {column})")]
    RankDeficient { column: usize },

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Diverged { epoch: usize, loss: f64 },

    #[error("network failure after {attempts} attempts: {message}")]
    Network { attempts: usize, message: String },

    #[error("HTTP status {status} from {url}")]
    HttpStatus { status: u16, url: String },

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Serde(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
