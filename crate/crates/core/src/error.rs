use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate label `{0}` in ground set")]
    DuplicateLabel(String),

    #[error("ground sets do not match: {0}")]
    GroundMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mass {mass} outside tolerance {tolerance}")]
    MassOutOfTolerance { mass: f64, tolerance: f64 },

    #[error("invalid probability {value} for `{label}`")]
    InvalidProbability { label: String, value: f64 },

    #[error("invalid cost {value} at ({row}, {col})")]
    InvalidCost { row: usize, col: usize, value: f64 },

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("relation is empty")]
    EmptyRelation,

    #[error("invalid epsilon {0}")]
    InvalidEpsilon(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid coupling: {0}")]
    InvalidCoupling(String),

    #[error("input `{input}` has zero approximate mass under auxiliary input `{aux}`")]
    UnsupportedInput { aux: String, input: String },

    #[error("approximate and actual distributions for `{0}` have different supports")]
    InfiniteEpsilon(String),

    #[error("transport solver did not converge after {0} pivots")]
    SolverNonconvergence(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
