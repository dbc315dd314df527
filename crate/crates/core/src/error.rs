use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalars from different fields ({0} vs {1})")]
    MixedFields(String, String),
    #[error("invalid field declaration: {0}")]
    InvalidField(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{what} budget of {limit} exceeded")]
    Budget { what: &'static str, limit: usize },
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
