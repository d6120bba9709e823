use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Index 0, bad parameters, short windows and the like.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("truncation order {order} exceeds the configured maximum {max}")]
    Resource { order: usize, max: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    /// A closed-form product hit a zero denominator at index `index`.
    #[error("degenerate denominator at index {index}: coefficient repeats the eigenvalue")]
    Degenerate { index: usize },

    #[error("value {value} at index {index} is not representable ({what})")]
    Unrepresentable {
        index: usize,
        value: f64,
        what: &'static str,
    },

    /// A theorem-driven result was requested without its hypotheses.
    #[error("refused: hypothesis not verified: {0}")]
    Refused(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidSpec(msg.into())
    }
}
