use thiserror::Error;

use crate::scalar::ScalarKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("scalar kind mismatch: {0} vs {1}")]
    KindMismatch(ScalarKind, ScalarKind),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is singular")]
    Singular,

    #[error("{0} is not prime")]
    NotPrime(u64),

    /// None of the cheap consistent norms of the Kronecker sum is below 1.
    #[error("norm hypothesis failed: L1 = {l1}, LInf = {linf}, Frobenius = {frobenius} (all >= 1)")]
    NormBound { l1: f64, linf: f64, frobenius: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("word exploration hit degree cap {0} before saturating")]
    DegreeCap(usize),

    #[error("generator entries must be integers")]
    NotInteger,

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    /// Process exit code used by the command-line tool and the C API.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::Shape(_)
            | Error::KindMismatch(..)
            | Error::NotPrime(_)
            | Error::NotInteger
            | Error::Unsupported(_) => 2,
            Error::NormBound { .. } => 3,
            Error::Singular | Error::Numeric(_) | Error::DegreeCap(_) => 4,
            Error::OutOfRange(_) => 5,
        }
    }
}
