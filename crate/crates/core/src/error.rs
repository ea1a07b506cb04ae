use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,
    #[error("series contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("invalid period {period} for a series of length {len}")]
    PeriodInvalid { period: usize, len: usize },
    #[error("series has zero variance")]
    ConstantSeries,
    #[error("lag {lag} is too large for a series of length {len}")]
    LagTooLarge { lag: usize, len: usize },
    #[error("degrees of freedom must be positive (max lag {max_lag}, fitted parameters {params})")]
    DegreesOfFreedomNonPositive { max_lag: usize, params: usize },
    #[error("probability {0} is outside (0, 1)")]
    POutOfRange(f64),
    #[error("no samples supplied")]
    EmptySamples,
    #[error("k = {k} is outside 1..={len}")]
    KOutOfRange { k: usize, len: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("matrix has {got} entries, expected {expected}")]
    MatrixShape { expected: usize, got: usize },
    #[error("series of length {len} is too short, need at least {needed}")]
    SeriesTooShort { len: usize, needed: usize },
    #[error("expected {expected} initial values, got {got}")]
    InitialValuesLengthMismatch { expected: usize, got: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("linear system is singular")]
    SingularSystem,
    #[error("every candidate model failed to fit")]
    AllFitsFailed,
    #[error("model has no stored residuals to resample")]
    NoResiduals,
    #[error("model has not been fitted")]
    NotFitted,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("window {window} has horizon {got}, expected {expected}")]
    InconsistentHorizon {
        window: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid block length: {0}")]
    BlockLenInvalid(String),
    #[error("mean block length {0} must be at least 1")]
    MeanBlockInvalid(f64),
    #[error("column {0} has zero variance")]
    DegenerateColumn(usize),
    #[error("{rows} rows cannot estimate a covariance of order {cols}")]
    RankDeficient { rows: usize, cols: usize },
    #[error("path {index} has horizon {got}, expected {expected}")]
    HorizonMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("region has an infinite bound at horizon {0}")]
    InfiniteBound(usize),
    #[error("experiment needs {needed} observations but the series has {len}")]
    ConfigTooLargeForSeries { needed: usize, len: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("report is empty")]
    EmptyReport,
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
