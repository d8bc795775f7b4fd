use thiserror::Error;

use crate::solution::SolveResult;
use crate::Scalar;

/// Errors raised by the model layer: bad inputs or a trajectory that left the feasible regime.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: &'static str, reason: String },

    #[error("length mismatch: expected {expected} controls, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// `delta1 * v_t > 1` at `step`, so the prey update went negative.
    #[error("infeasible regime at step {step}: predation factor 1 - delta1*v is negative")]
    InfeasibleRegime { step: usize },
}

impl ModelError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        ModelError::Validation {
            field,
            reason: reason.into(),
        }
    }
}

/// Solver failure. `NotConverged` keeps the last iterate so callers can still inspect it.
#[derive(Debug, Error)]
pub enum SolveError<F: Scalar> {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("solver did not converge after {} iterations", .0.iterations)]
    NotConverged(Box<SolveResult<F>>),
}

impl<F: Scalar> SolveError<F> {
    pub fn last_iterate(&self) -> Option<&SolveResult<F>> {
        match self {
            SolveError::NotConverged(r) => Some(r),
            SolveError::Model(_) => None,
        }
    }
}
