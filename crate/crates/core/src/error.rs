use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("matrix is not Hermitian (max |H - H^dagger| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not positive semidefinite (lambda_min = {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid dimension {0}: every subsystem needs d >= 2")]
    InvalidDimension(usize),

    #[error("parameter `{name}` = {value} outside {range} for family `{family}`")]
    ParameterOutOfRange {
        family: String,
        name: String,
        value: f64,
        range: String,
    },

    #[error("family `{family}` expects {expected} parameter(s), got {found}")]
    ParameterCount {
        family: String,
        expected: usize,
        found: usize,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("construction undefined: {0}")]
    Undefined(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn mismatch(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
