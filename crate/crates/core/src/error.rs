use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: row {row}: {message}")]
    Parse {
        path: String,
        row: usize,
        message: String,
    },

    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),

    #[error("non-finite value at {0}")]
    NonFinite(String),

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("length mismatch: expected {expected}, got {actual} ({what})")]
    LengthMismatch {
        what: String,
        expected: usize,
        actual: usize,
    },

    #[error("insufficient data: need at least {required} points, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty date intersection across the panel")]
    EmptyIntersection,

    #[error("series `{label}` has no value on or before {date}")]
    LeadingGap { label: String, date: NaiveDate },

    #[error("all-zero semi-norm curve: the window carries no regularity information")]
    DegenerateCurve,

    #[error("all-zero series cannot be normalized")]
    ZeroSeries,

    #[error("date {0} is not on the price axis")]
    MissingDate(NaiveDate),

    #[error("non-summable tail: s(t) = {s} <= 0 at t = {t}")]
    NonSummable { t: f64, s: f64 },

    #[error("equity must be positive, got {0}")]
    NonPositiveEquity(f64),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// True for violations of internal state-machine invariants, as opposed
    /// to bad input data or parameters.
    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}
