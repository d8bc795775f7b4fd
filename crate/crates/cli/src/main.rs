use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use augopt_core::direct::OptimizerConfig;
use augopt_core::model::{objective, simulate, ControlSchedule, ModelKind};
use augopt_core::scenario::{
    builtin_scenario, builtin_scenarios, emit_csv, emit_report_csv, emit_table, load_scenario, parse_controls,
    run_grid, run_scenario, ModelTag, RunReport, ScenarioError, ScenarioSpec, SolverConfigs,
};
use augopt_core::SolveError;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "augopt",
    version,
    about = "Optimal reserve-to-prey augmentation under an Allee effect"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario, uncontrolled or under a given control schedule.
    Simulate {
        #[command(flatten)]
        target: Target,
        /// Control schedule file: a trajectory CSV or bare comma/newline separated values.
        #[arg(long)]
        controls: Option<PathBuf>,
        /// Step map used with --controls.
        #[arg(long, value_enum, default_value_t = Model::A)]
        model: Model,
    },
    /// Solve for the optimal schedule of one model.
    Solve {
        #[arg(long, value_enum)]
        model: Model,
        #[command(flatten)]
        target: Target,
        /// Sweep relaxation weight on the previous iterate.
        #[arg(long)]
        sweep_relax: Option<f64>,
        /// Sweep relative convergence tolerance.
        #[arg(long)]
        sweep_tol: Option<f64>,
        /// Comma-separated constant starting schedules.
        #[arg(long, value_delimiter = ',')]
        starts: Option<Vec<f64>>,
        /// Projected-gradient stopping tolerance.
        #[arg(long)]
        kkt_tol: Option<f64>,
    },
    /// Solve every built-in scenario under both models and write the comparison table.
    Table {
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Target {
    /// Built-in scenario name or path to a scenario file.
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    A,
    B,
}

impl Model {
    fn tag(self) -> ModelTag {
        match self {
            Model::A => ModelTag::A,
            Model::B => ModelTag::B,
        }
    }

    fn kind(self) -> ModelKind {
        match self {
            Model::A => ModelKind::ModelA,
            Model::B => ModelKind::ModelB,
        }
    }
}

enum Failure {
    Input(anyhow::Error),
    NotConverged(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate {
            target,
            controls,
            model,
        } => simulate_cmd(&target, controls.as_deref(), model),
        Command::Solve {
            model,
            target,
            sweep_relax,
            sweep_tol,
            starts,
            kkt_tol,
        } => solve_cmd(model, &target, sweep_relax, sweep_tol, starts, kkt_tol),
        Command::Table { out } => table_cmd(&out),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NotConverged(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn resolve_scenario(arg: &str) -> anyhow::Result<ScenarioSpec> {
    if let Some(spec) = builtin_scenario(arg) {
        return Ok(spec);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(ScenarioError::UnknownScenario(arg.to_string()).into());
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    load_scenario(&text).with_context(|| format!("loading {}", path.display()))
}

fn prepare_out(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write_trajectory(
    path: &Path,
    traj: &augopt_core::Trajectory64,
    adjoints: Option<&augopt_core::AdjointTrajectory64>,
) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    emit_csv(traj, adjoints, &mut buf)?;
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))
}

fn simulate_cmd(target: &Target, controls: Option<&Path>, model: Model) -> Result<(), Failure> {
    let spec = resolve_scenario(&target.scenario)?;
    let horizon = spec.objective.horizon;
    let traj = match controls {
        None => simulate(ModelKind::Uncontrolled, spec.initial, None, &spec.params, horizon)?,
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let h = ControlSchedule(parse_controls(&text)?);
            h.validate(spec.objective.max_effort)?;
            simulate(model.kind(), spec.initial, Some(h.as_slice()), &spec.params, horizon)?
        }
    };
    let traj = traj.require_feasible()?;
    prepare_out(&target.out)?;
    write_trajectory(&target.out.join("trajectory.csv"), &traj, None)?;
    println!("{}: J = {:.6}", spec.name, objective(&traj, &spec.objective)?);
    Ok(())
}

fn solve_cmd(
    model: Model,
    target: &Target,
    sweep_relax: Option<f64>,
    sweep_tol: Option<f64>,
    starts: Option<Vec<f64>>,
    kkt_tol: Option<f64>,
) -> Result<(), Failure> {
    let spec = resolve_scenario(&target.scenario)?;
    let mut configs = SolverConfigs::default();
    if let Some(r) = sweep_relax {
        configs.sweep.relaxation = r;
    }
    if let Some(t) = sweep_tol {
        configs.sweep.tol = t;
    }
    if starts.is_some() || kkt_tol.is_some() {
        let mut cfg = OptimizerConfig::for_bound(spec.objective.max_effort);
        if let Some(s) = starts {
            cfg.starts = s;
        }
        if let Some(k) = kkt_tol {
            cfg.kkt_tol = k;
        }
        cfg.validate(spec.objective.max_effort)?;
        configs.direct = Some(cfg);
    }
    configs.sweep.validate()?;
    prepare_out(&target.out)?;

    let uncontrolled = simulate(
        ModelKind::Uncontrolled,
        spec.initial,
        None,
        &spec.params,
        spec.objective.horizon,
    )?;
    write_trajectory(&target.out.join("uncontrolled.csv"), &uncontrolled, None)?;

    let model_csv = target
        .out
        .join(format!("model_{}.csv", model.tag().label().to_lowercase()));
    let report = match run_scenario(&spec, model.tag(), &configs) {
        Ok(report) => report,
        Err(ScenarioError::Solve {
            source: SolveError::NotConverged(last),
            scenario,
            model: label,
        }) => {
            write_trajectory(&model_csv, &last.trajectory, last.adjoints.as_ref())?;
            return Err(Failure::NotConverged(anyhow!(
                "scenario `{scenario}`, model {label}: no convergence after {} iterations; last iterate written to {}",
                last.iterations,
                model_csv.display()
            )));
        }
        Err(e) => return Err(e.into()),
    };
    write_trajectory(
        &model_csv,
        &report.solution.trajectory,
        report.solution.adjoints.as_ref(),
    )?;
    write_reports(&target.out, std::slice::from_ref(&report))?;
    Ok(())
}

fn write_reports(dir: &Path, reports: &[RunReport]) -> anyhow::Result<()> {
    let table = emit_table(reports);
    fs::write(dir.join("report.txt"), &table)?;
    fs::write(dir.join("report.csv"), emit_report_csv(reports))?;
    print!("{table}");
    Ok(())
}

fn table_cmd(out: &Path) -> Result<(), Failure> {
    prepare_out(out)?;
    let reports = match run_grid(
        &builtin_scenarios(),
        &[ModelTag::A, ModelTag::B],
        &SolverConfigs::default(),
    ) {
        Ok(r) => r,
        Err(e) if e.is_not_converged() => return Err(Failure::NotConverged(e.into())),
        Err(e) => return Err(e.into()),
    };
    let table = emit_table(&reports);
    fs::write(out.join("table.txt"), &table)?;
    fs::write(out.join("table.csv"), emit_report_csv(&reports))?;
    print!("{table}");
    Ok(())
}
