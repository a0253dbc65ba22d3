use thiserror::Error;

use crate::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {field} ({reason})")]
    InvalidInstance {
        field: &'static str,
        reason: String,
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("demand {value} at slot {slot} outside [{lower}, {upper}]")]
    DemandOutOfBounds {
        slot: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("capacity violation at slot {slot}: used {used} > capacity {capacity}")]
    CapacityViolation {
        slot: usize,
        used: f64,
        capacity: f64,
    },

    #[error("ratio must be >= 1, got {0}")]
    InvalidRatio(f64),

    #[error("degenerate ratio lower bound at slot {slot}: denominator {denominator}")]
    DegenerateRatio { slot: usize, denominator: f64 },

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("invalid policy parameter: {0}")]
    InvalidPolicy(String),

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with any added context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::Lp(_) | Error::CapacityViolation { .. } | Error::DegenerateRatio { .. }
        )
    }
}
