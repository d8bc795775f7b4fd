use super::{ModelTag, ScenarioError, ScenarioSpec};
use crate::direct::{solve_direct, OptimizerConfig};
use crate::fbsm::{solve_fbsm, SweepConfig};
use crate::model::{no_control_objective, ControlSchedule};
use crate::solution::SolveResult;

/// Solver settings for a run. `direct = None` uses the default start grid for each
/// scenario's bound `A`.
#[derive(Debug, Clone, Default)]
pub struct SolverConfigs {
    pub sweep: SweepConfig<f64>,
    pub direct: Option<OptimizerConfig<f64>>,
}

/// One cell of the comparison table plus the solution behind it.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub scenario: String,
    pub model: ModelTag,
    pub j_no_control: f64,
    pub j_optimal: f64,
    pub percent_increase: i64,
    pub controls: ControlSchedule<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub solution: SolveResult<f64>,
}

/// `round(100 (j_optimal / j_no_control - 1))`.
pub fn percent_increase(j_no_control: f64, j_optimal: f64) -> i64 {
    (100.0 * (j_optimal / j_no_control - 1.0)).round() as i64
}

pub fn run_scenario(spec: &ScenarioSpec, model: ModelTag, configs: &SolverConfigs) -> Result<RunReport, ScenarioError> {
    spec.validate()?;
    let j_no_control = no_control_objective(spec.initial, &spec.params, &spec.objective)?;
    let solved = match model {
        ModelTag::A => solve_fbsm(spec.initial, &spec.params, &spec.objective, &configs.sweep),
        ModelTag::B => {
            let cfg = configs
                .direct
                .clone()
                .unwrap_or_else(|| OptimizerConfig::for_bound(spec.objective.max_effort));
            solve_direct(spec.initial, &spec.params, &spec.objective, &cfg)
        }
    };
    let solution = solved.map_err(|source| ScenarioError::Solve {
        scenario: spec.name.clone(),
        model: model.label(),
        source,
    })?;
    Ok(RunReport {
        scenario: spec.name.clone(),
        model,
        j_no_control,
        j_optimal: solution.objective_value,
        percent_increase: percent_increase(j_no_control, solution.objective_value),
        controls: solution.controls.clone(),
        converged: solution.converged,
        iterations: solution.iterations,
        solution,
    })
}

/// Every scenario against every model, scenario-major.
pub fn run_grid(
    specs: &[ScenarioSpec],
    models: &[ModelTag],
    configs: &SolverConfigs,
) -> Result<Vec<RunReport>, ScenarioError> {
    specs
        .iter()
        .flat_map(|s| models.iter().map(move |&m| (s, m)))
        .map(|(s, m)| run_scenario(s, m, configs))
        .collect()
}
