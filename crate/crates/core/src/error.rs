use thiserror::Error;

use crate::domain::VarId;

/// Errors raised while building a model. Unsatisfiability is not an error:
/// it shows up as a failed space.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("variable {var} does not exist (space has {count} variables)")]
    InvalidVar { var: VarId, count: usize },
    #[error("variable {var} must have a domain within {{0, 1}}")]
    NonBoolean { var: VarId },
    #[error("modulus must be positive, got {0}")]
    NonPositiveModulus(i64),
    #[error("{what} needs at least {min} variables, got {got}")]
    TooFewVariables { what: &'static str, min: usize, got: usize },
    #[error("invalid automaton: {0}")]
    InvalidDfa(String),
    #[error("invalid value for `{field}`: {message}")]
    InvalidSpec { field: &'static str, message: String },
}

impl ModelError {
    pub(crate) fn spec(field: &'static str, message: impl Into<String>) -> Self {
        ModelError::InvalidSpec { field, message: message.into() }
    }
}
