use crate::config::ViolationReport;
use thiserror::Error;

/// Errors raised by the spectral maps.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid band set: {0}")]
    InvalidSet(String),
    #[error("inadmissible configuration: {0}")]
    Inadmissible(ViolationReport),
    #[error("divisibility violation: remainder {remainder:.3e} exceeds bound {bound:.3e}")]
    Divisibility { remainder: f64, bound: f64 },
    #[error("singular interpolation system (condition {condition:.3e}); closest nodes {a} and {b}")]
    SingularSystem { condition: f64, a: String, b: String },
    #[error("interpolation condition count {conditions} does not match {unknowns} unknowns")]
    ConditionCount { conditions: usize, unknowns: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("accuracy target missed: best estimate {estimate} with discrepancy {discrepancy:.3e}")]
    Accuracy { estimate: String, discrepancy: f64 },
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("moment recursion broke down after {stable} stable steps")]
    Breakdown { stable: usize },
    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inadmissible(_) => 1,
            Error::Schema(_) | Error::InvalidSet(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
