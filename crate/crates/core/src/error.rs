//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("endomorphism does not induce an automorphism at this truncation: {0}")]
    NonInvertible(String),
    #[error("automorphism is not in the Andreadakis group A_n({0})")]
    NotInAndreadakis(usize),
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("endomorphism does not fix the boundary word: {0}")]
    BoundaryNotFixed(String),
    #[error("polynomial is not integer-valued: coefficient of {0} is {1}")]
    NotIntegerValued(String, String),
    #[error("face polynomials disagree on a face intersection: {0}")]
    FaceMismatch(String),
    #[error("exactness division left a remainder: {0}")]
    DivisionFailure(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant breach: {0}")]
    Internal(String),
}

impl Error {
    /// CLI exit code class for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Internal(_) => 4,
            _ => 3,
        }
    }
}
