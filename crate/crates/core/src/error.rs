use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("series inversion needs a nonzero constant leading coefficient, found {0}")]
    NotInvertible(String),
    #[error("square root needs an even valuation and a rational square leading coefficient: {0}")]
    NoSquareRoot(String),
    #[error("operation needs a finite truncation order")]
    UnboundedPrecision,
    #[error("truncation window exhausted: {0}")]
    WindowExhausted(String),
    #[error("fixed-point update does not contract: {0}")]
    NonContracting(String),
    #[error("inexact division: {0}")]
    InexactDivision(String),
    #[error("identity failed: {0}")]
    IdentityFailed(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("not ergodic: {0}")]
    NotErgodic(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
