//! Scenario catalog, configuration documents, solver dispatch and report output.

mod catalog;
mod config;
mod output;
mod runner;

use thiserror::Error;

use crate::error::{ModelError, SolveError};
use crate::model::{ModelParams, ObjectiveParams, State};

pub use catalog::{builtin_scenario, builtin_scenarios, BASELINE};
pub use config::{load_scenario, serialize_scenario};
pub use output::{emit_csv, emit_report_csv, emit_table, parse_controls, parse_trajectory_csv, ParsedTrajectory};
pub use runner::{percent_increase, run_grid, run_scenario, RunReport, SolverConfigs};

/// A named, fully specified run: parameters, objective and initial populations.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub params: ModelParams<f64>,
    pub objective: ObjectiveParams<f64>,
    pub initial: State<f64>,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.params.validate()?;
        self.objective.validate()?;
        self.initial.validate()
    }
}

/// Controlled model solved by a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelTag {
    A,
    B,
}

impl ModelTag {
    pub fn label(self) -> &'static str {
        match self {
            ModelTag::A => "A",
            ModelTag::B => "B",
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Invalid(#[from] ModelError),

    #[error("scenario `{scenario}`, model {model}: {source}")]
    Solve {
        scenario: String,
        model: &'static str,
        #[source]
        source: SolveError<f64>,
    },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ScenarioError {
    /// True for solver non-convergence, as opposed to bad input.
    pub fn is_not_converged(&self) -> bool {
        matches!(
            self,
            ScenarioError::Solve {
                source: SolveError::NotConverged(_),
                ..
            }
        )
    }
}
