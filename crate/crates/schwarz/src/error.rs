use thiserror::Error;

/// Errors raised by the algebra kernels and front ends.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("series precondition violated: {0}")]
    Series(String),
    #[error("operator precondition violated: {0}")]
    Operator(String),
    #[error("not a MUM point: indicial polynomial {indicial}")]
    NotMum { indicial: String },
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("unknown case {0:?}")]
    UnknownCase(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
