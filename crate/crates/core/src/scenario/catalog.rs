use super::ScenarioSpec;
use crate::model::{ModelParams, ObjectiveParams, State};

pub const BASELINE: &str = "baseline";

fn baseline() -> ScenarioSpec {
    ScenarioSpec {
        name: BASELINE.to_string(),
        params: ModelParams::baseline(),
        objective: ObjectiveParams::baseline(),
        initial: State::new(0.2, 0.5, 0.7),
    }
}

fn variant(name: &str, edit: impl FnOnce(&mut ScenarioSpec)) -> ScenarioSpec {
    let mut spec = baseline();
    spec.name = name.to_string();
    edit(&mut spec);
    spec
}

/// The baseline and its four parameter variations, in table order.
pub fn builtin_scenarios() -> Vec<ScenarioSpec> {
    vec![
        baseline(),
        variant("m2-zero", |s| s.objective.linear_cost = 0.0),
        variant("m2-zero-n-0.1", |s| {
            s.objective.linear_cost = 0.0;
            s.objective.reserve_weight = 0.1;
        }),
        variant("low-reserve", |s| {
            s.params.reserve_growth_rate = 0.70;
            s.params.reserve_capacity = 0.60;
        }),
        variant("gamma-0.10", |s| s.params.predator_decay = 0.10),
    ]
}

pub fn builtin_scenario(name: &str) -> Option<ScenarioSpec> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

/// Human-readable row label for report tables.
pub(crate) fn label(name: &str) -> &str {
    match name {
        "baseline" => "Baseline",
        "m2-zero" => "M2 = 0",
        "m2-zero-n-0.1" => "M2 = 0, N = 0.1",
        "low-reserve" => "q = 0.70, k_w = 0.60",
        "gamma-0.10" => "gamma = 0.10",
        other => other,
    }
}
