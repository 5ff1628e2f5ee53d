use thiserror::Error;

/// Errors raised by the exact engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cyclotomic order mismatch: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },

    #[error("order {from} does not divide target order {to}")]
    NotDivisible { from: u32, to: u32 },

    #[error("matrix has determinant {0}, expected 1")]
    Determinant(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported by the defining sum: {0}")]
    Unsupported(String),

    #[error("transversal has no member for coset key {0}")]
    MissingCoset(String),

    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
