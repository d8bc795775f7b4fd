//! The sweep and the direct optimizer reach Model A optima by unrelated routes
//! (analytic adjoints vs finite differences); they must agree.

use augopt_core::direct::{solve_direct_for, OptimizerConfig};
use augopt_core::fbsm::{solve_fbsm, SweepConfig};
use augopt_core::model::ModelKind;
use augopt_core::scenario::builtin_scenarios;

#[test]
fn sweep_matches_direct_optimizer_on_model_a() {
    let strict = SweepConfig {
        tol: 1e-9,
        ..SweepConfig::default()
    };
    for spec in builtin_scenarios() {
        let sweep = solve_fbsm(spec.initial, &spec.params, &spec.objective, &strict).unwrap();
        let cfg = OptimizerConfig::for_bound(spec.objective.max_effort);
        let direct = solve_direct_for(ModelKind::ModelA, spec.initial, &spec.params, &spec.objective, &cfg).unwrap();
        assert!(
            (sweep.objective_value - direct.objective_value).abs() < 1e-7,
            "{}: {} vs {}",
            spec.name,
            sweep.objective_value,
            direct.objective_value
        );
        for (a, b) in sweep.controls.0.iter().zip(&direct.controls.0) {
            assert!(
                (a - b).abs() < 1e-4,
                "{}: {:?} vs {:?}",
                spec.name,
                sweep.controls,
                direct.controls
            );
        }
    }
}

#[test]
fn default_sweep_converges_on_every_builtin() {
    for spec in builtin_scenarios() {
        let sol = solve_fbsm(spec.initial, &spec.params, &spec.objective, &SweepConfig::default()).unwrap();
        assert!(
            sol.converged && sol.iterations < 200,
            "{}: {} iterations",
            spec.name,
            sol.iterations
        );
    }
}

#[test]
fn single_precision_sweep_runs() {
    use augopt_core::{ModelParams32, ObjectiveParams32, State32};
    let sol = solve_fbsm(
        State32::new(0.2, 0.5, 0.7),
        &ModelParams32::baseline(),
        &ObjectiveParams32::baseline(),
        &SweepConfig::default(),
    )
    .unwrap();
    assert!((sol.objective_value - 0.5096).abs() < 1e-3, "{}", sol.objective_value);
}
