use thiserror::Error;

/// Errors surfaced by the matching library.
#[derive(Debug, Error)]
pub enum MatchError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown vertex identifier: {0}")]
    UnknownVertex(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("inadmissible word: {0}")]
    InadmissibleWord(String),

    #[error("policy {0} does not support this operation")]
    UnsupportedPolicy(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("stability condition violated: the product-form series diverges")]
    NcondViolated,

    #[error("search cap exceeded: {0}")]
    CapExceeded(String),

    #[error("no sample within horizon cap {cap}: {details}")]
    NoSample { cap: usize, details: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, MatchError>;
