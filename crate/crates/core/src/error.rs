use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    #[error("training did not converge: {0}")]
    NotConverged(String),

    /// `z` holds the feature weights reached before the failing iteration.
    #[error("feature selection aborted at iteration {iteration}: inner SVM did not converge")]
    SelectionAborted { iteration: usize, z: Vec<f64> },

    #[error("unknown identifier `{0}`")]
    UnknownId(String),

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
