use thiserror::Error;

use crate::algebra::AlgebraError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("exponential series did not terminate within degree {bound}")]
    NonTerminating { bound: usize },
    #[error("section is not in the span of the frame (residual {residual})")]
    NotInSpan { residual: String },
    #[error("degenerate {what} at evaluation point (|det| = {det:e})")]
    Degenerate { what: String, det: f64 },
    #[error("twist form is not closed: dH = {0}")]
    NotClosed(String),
    #[error("Maurer-Cartan residual is nonzero: {0}")]
    NonIntegrable(String),
    #[error("V+ is not positive at a sample point (min eigenvalue {min:e}); use a smaller lambda")]
    Positivity { min: f64 },
    #[error("invalid extended action: {0}")]
    InvalidAction(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
