use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is too small, n >= 3 is required")]
    DimensionTooSmall(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not symmetric (max |m_ij - m_ji| = {0:e})")]
    NotSymmetric(f64),

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("could not sample a nonzero point of the cone after {0} attempts")]
    SamplingFailure(usize),

    #[error("matrix is not positive definite (lambda_min = {0}); shift it first")]
    NotPositiveDefinite(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("contradictory conclusive verdicts: {0}")]
    Contradiction(String),

    #[error("invalid field `{field}`: {message}")]
    Field { field: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Field {
            field: field.into(),
            message: message.into(),
        }
    }
}
