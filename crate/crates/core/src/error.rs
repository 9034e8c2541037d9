use thiserror::Error;

use crate::trigpoly::FreqKey;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("variable `{var}` at position {pos} appears outside a sin/cos argument")]
    NonTrigTerm { pos: usize, var: char },

    #[error("trig argument at position {pos} is not of the form pi*(m*x + n*y + c): {msg}")]
    NonLinearTrigArgument { pos: usize, msg: String },

    #[error("Hamiltonian is not periodic on the unit torus (odd frequency ({}, {}))", key.m, key.n)]
    NotPeriodic { key: FreqKey },

    #[error("Hamiltonian is not real-valued")]
    NotReal,

    #[error("order must be at least {min}, got {got}")]
    InvalidOrder { got: usize, min: usize },

    #[error("series mismatch: {0}")]
    MismatchedSeries(String),

    #[error("denominator series must have constant term 1")]
    BadConstantTerm,

    #[error("grid size must be at least 2, got {0}")]
    InvalidGrid(usize),

    #[error("ODE integration failed at t = {t}: {msg}")]
    StepFailure { t: f64, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Diagnostic position in the source text, for parse-stage errors.
    pub fn position(&self) -> Option<usize> {
        match self {
            Error::Syntax { pos, .. }
            | Error::NonTrigTerm { pos, .. }
            | Error::NonLinearTrigArgument { pos, .. } => Some(*pos),
            _ => None,
        }
    }
}
