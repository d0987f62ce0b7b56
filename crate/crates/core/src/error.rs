use thiserror::Error;

/// Errors surfaced by the toolkit.
///
/// `TheoremViolation` is special: it signals that a verified mathematical
/// statement failed on concrete data, and always carries enough of a witness
/// to reproduce the failure. It is never swallowed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("level error: {0}")]
    Level(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("config error: {0}")]
    Config(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("check '{check}' failed{}", witness.as_ref().map(|w| format!(": {w}")).unwrap_or_default())]
    TheoremViolation {
        check: String,
        witness: Option<String>,
    },

    #[error("degenerate truncation: {0}")]
    DegenerateTruncation(String),

    #[error("inconclusive truncation: {0}")]
    InconclusiveTruncation(String),
}

impl Error {
    pub fn violation(check: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::TheoremViolation {
            check: check.into(),
            witness: Some(witness.into()),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
