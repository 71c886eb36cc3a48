//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in the cyclotomic field")]
    DivisionByZero,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("mixed scalar backends within one container")]
    MixedBackend,

    #[error("angle {0} is not a multiple of pi/12; exact backend refused")]
    NotEmbeddable(String),

    #[error("completion pair is not orthonormal: {0}")]
    NonOrthonormalCompletion(String),

    #[error("complement generator {index} is not orthogonal to member {member} (|overlap| = {overlap:.3e})")]
    InvalidComplement {
        index: usize,
        member: usize,
        overlap: f64,
    },

    #[error("complement generators are not an orthonormal pair: {0}")]
    DegenerateComplement(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
