//! Direct maximization of `J(h)` over the box `[0, A]^T`.
//!
//! The Model B Hamiltonian is cubic in the control, so there is no closed-form
//! characterization. Instead `J` is maximized directly with a projected quasi-Newton
//! method: finite-difference gradients, a BFGS inverse-Hessian model restricted to the
//! free variables, and a backtracking Armijo search along the projected path. A grid
//! of constant starting schedules guards against the non-concave landscape.

use crate::error::{ModelError, SolveError};
use crate::model::{objective, simulate, ControlSchedule, ModelKind, ModelParams, ObjectiveParams, State};
use crate::scalar::clamp;
use crate::solution::SolveResult;
use crate::Scalar;

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig<F> {
    /// Constant-schedule starting points, each within `[0, A]`.
    pub starts: Vec<F>,
    /// Relative finite-difference step.
    pub grad_step: F,
    /// Absolute lower limit on the finite-difference step.
    pub grad_floor: F,
    /// Tolerance on `||P(h + grad J) - h||_inf`.
    pub kkt_tol: F,
    /// Iteration cap per start.
    pub max_iter: usize,
}

impl<F: Scalar> OptimizerConfig<F> {
    /// Default settings with starts `{0, A/4, A/2, 3A/4, A}`.
    pub fn for_bound(max_effort: F) -> Self {
        let starts = (0..=4).map(|i| max_effort * F::lit(i as f64) / F::lit(4.0)).collect();
        Self {
            starts,
            grad_step: F::lit(1e-7),
            grad_floor: F::lit(1e-8),
            kkt_tol: F::lit(1e-6),
            max_iter: 500,
        }
    }

    pub fn validate(&self, max_effort: F) -> Result<(), ModelError> {
        if !(self.grad_step > F::zero()) || !(self.grad_floor > F::zero()) {
            return Err(ModelError::invalid("grad_step", "must be positive"));
        }
        if !(self.kkt_tol > F::zero()) {
            return Err(ModelError::invalid("kkt_tol", "must be positive"));
        }
        if self.max_iter < 1 {
            return Err(ModelError::invalid("max_iter", "must be at least 1"));
        }
        if self.starts.is_empty() {
            return Err(ModelError::invalid("starts", "at least one start is required"));
        }
        if let Some(s) = self.starts.iter().find(|&&s| !(s >= F::zero() && s <= max_effort)) {
            return Err(ModelError::invalid(
                "starts",
                format!("start {s} outside [0, {max_effort}]"),
            ));
        }
        Ok(())
    }
}

/// `J(h)` under Model B dynamics.
pub fn objective_of_controls<F: Scalar>(
    h: &[F],
    x0: State<F>,
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
) -> Result<F, ModelError> {
    objective_for(ModelKind::ModelB, h, x0, p, obj)
}

fn objective_for<F: Scalar>(
    kind: ModelKind,
    h: &[F],
    x0: State<F>,
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
) -> Result<F, ModelError> {
    let traj = simulate(kind, x0, Some(h), p, obj.horizon)?.require_feasible()?;
    objective(&traj, obj)
}

/// Finite-difference gradient of the Model B objective.
pub fn gradient<F: Scalar>(
    h: &[F],
    x0: State<F>,
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
    cfg: &OptimizerConfig<F>,
) -> Result<Vec<F>, ModelError> {
    let f = |x: &[F]| objective_of_controls(x, x0, p, obj);
    fd_gradient(&f, h, f(h)?, obj.max_effort, cfg)
}

/// Central differences inside the box, one-sided inward where the stencil would leave it.
fn fd_gradient<F: Scalar>(
    f: &dyn Fn(&[F]) -> Result<F, ModelError>,
    h: &[F],
    value: F,
    upper: F,
    cfg: &OptimizerConfig<F>,
) -> Result<Vec<F>, ModelError> {
    let mut probe = h.to_vec();
    let mut grad = Vec::with_capacity(h.len());
    for t in 0..h.len() {
        let x = h[t];
        let step = (cfg.grad_step * x.abs()).max(cfg.grad_floor);
        let fits_below = x - step >= F::zero();
        let fits_above = x + step <= upper;
        let mut eval = |at: F| {
            probe[t] = at;
            let v = f(&probe);
            probe[t] = x;
            v
        };
        let g = if fits_below == fits_above {
            (eval(x + step)? - eval(x - step)?) / (F::two() * step)
        } else if fits_above {
            (eval(x + step)? - value) / step
        } else {
            (value - eval(x - step)?) / step
        };
        grad.push(g);
    }
    Ok(grad)
}

/// `||P_box(h + g) - h||_inf` for an ascent gradient `g`.
pub fn kkt_residual<F: Scalar>(h: &[F], grad: &[F], upper: F) -> F {
    h.iter()
        .zip(grad)
        .map(|(&x, &g)| (clamp(x + g, F::zero(), upper) - x).abs())
        .fold(F::zero(), F::max)
}

/// One start of the inner solver.
#[derive(Debug, Clone, PartialEq)]
pub struct StartOutcome<F> {
    pub start: F,
    pub controls: Vec<F>,
    pub value: F,
    pub iterations: usize,
    pub kkt: F,
    pub converged: bool,
}

fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn identity<F: Scalar>(n: usize) -> Vec<Vec<F>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect())
        .collect()
}

/// BFGS update of the inverse Hessian of `-J`, with `s` the step and `y` the change in `-grad J`.
fn bfgs_update<F: Scalar>(hinv: &mut [Vec<F>], s: &[F], y: &[F]) {
    let n = s.len();
    let rho = F::one() / dot(s, y);
    let hy: Vec<F> = (0..n).map(|i| dot(&hinv[i], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            hinv[i][j] += (F::one() + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

/// Maximizes `f` over `[0, upper]^n` from `start` by projected BFGS.
pub fn maximize_in_box<F: Scalar>(
    f: &dyn Fn(&[F]) -> Result<F, ModelError>,
    start: &[F],
    upper: F,
    cfg: &OptimizerConfig<F>,
) -> Result<StartOutcome<F>, ModelError> {
    let n = start.len();
    let project = |x: &mut [F]| x.iter_mut().for_each(|v| *v = clamp(*v, F::zero(), upper));
    let mut x = start.to_vec();
    project(&mut x);
    let mut value = f(&x)?;
    let mut grad = fd_gradient(f, &x, value, upper, cfg)?;
    let mut hinv = identity::<F>(n);
    let mut fresh = true;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        if kkt_residual(&x, &grad, upper) <= cfg.kkt_tol {
            break;
        }
        iterations += 1;

        // Variables pinned at a bound with the gradient pushing outward stay put.
        let free: Vec<bool> = (0..n)
            .map(|i| !((x[i] <= F::zero() && grad[i] < F::zero()) || (x[i] >= upper && grad[i] > F::zero())))
            .collect();
        let mut dir: Vec<F> = (0..n)
            .map(|i| {
                if !free[i] {
                    return F::zero();
                }
                (0..n).filter(|&j| free[j]).map(|j| hinv[i][j] * grad[j]).sum()
            })
            .collect();
        if dot(&dir, &grad) <= F::zero() {
            hinv = identity(n);
            fresh = true;
            dir = (0..n).map(|i| if free[i] { grad[i] } else { F::zero() }).collect();
        }

        let mut alpha = F::one();
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let mut trial: Vec<F> = x.iter().zip(&dir).map(|(&xi, &di)| xi + alpha * di).collect();
            project(&mut trial);
            let step: Vec<F> = trial.iter().zip(&x).map(|(&a, &b)| a - b).collect();
            if step.iter().all(|s| s.is_zero()) {
                break;
            }
            let trial_value = f(&trial)?;
            if trial_value >= value + F::lit(ARMIJO) * dot(&grad, &step) {
                accepted = Some((trial, trial_value, step));
                break;
            }
            alpha /= F::two();
        }

        let Some((trial, trial_value, step)) = accepted else {
            if fresh {
                // Steepest ascent made no progress either: stalled.
                break;
            }
            hinv = identity(n);
            fresh = true;
            continue;
        };

        let trial_grad = fd_gradient(f, &trial, trial_value, upper, cfg)?;
        let y: Vec<F> = grad.iter().zip(&trial_grad).map(|(&g0, &g1)| g0 - g1).collect();
        let sy = dot(&step, &y);
        if sy > F::lit(1e-12) * dot(&step, &step).sqrt() * dot(&y, &y).sqrt() {
            bfgs_update(&mut hinv, &step, &y);
            fresh = false;
        }
        x = trial;
        value = trial_value;
        grad = trial_grad;
    }

    let kkt = kkt_residual(&x, &grad, upper);
    Ok(StartOutcome {
        start: start.first().copied().unwrap_or_else(F::zero),
        controls: x,
        value,
        iterations,
        kkt,
        converged: kkt <= cfg.kkt_tol,
    })
}

/// True when `a` should win over `b`: larger value, then lexicographically lower schedule.
fn better<F: Scalar>(a: &StartOutcome<F>, b: &StartOutcome<F>) -> bool {
    if a.value != b.value {
        return a.value > b.value;
    }
    a.controls
        .iter()
        .zip(&b.controls)
        .find(|(x, y)| x != y)
        .is_some_and(|(x, y)| x < y)
}

/// Runs every start and returns all outcomes in start order.
pub fn multistart<F: Scalar>(
    kind: ModelKind,
    x0: State<F>,
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
    cfg: &OptimizerConfig<F>,
) -> Result<Vec<StartOutcome<F>>, ModelError> {
    x0.validate()?;
    obj.check_solvable()?;
    cfg.validate(obj.max_effort)?;
    let f = |h: &[F]| objective_for(kind, h, x0, p, obj);
    cfg.starts
        .iter()
        .map(|&s| {
            let mut out = maximize_in_box(&f, &vec![s; obj.horizon], obj.max_effort, cfg)?;
            out.start = s;
            Ok(out)
        })
        .collect()
}

/// Direct solve of the control problem under the dynamics of `kind`.
///
/// Returns the best converged start. If no start reaches the KKT tolerance, the best
/// iterate overall is returned inside [`SolveError::NotConverged`].
pub fn solve_direct_for<F: Scalar>(
    kind: ModelKind,
    x0: State<F>,
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
    cfg: &OptimizerConfig<F>,
) -> Result<SolveResult<F>, SolveError<F>> {
    let outcomes = multistart(kind, x0, p, obj, cfg)?;
    let pick = |only_converged: bool| {
        outcomes.iter().filter(|o| o.converged || !only_converged).fold(
            None::<&StartOutcome<F>>,
            |best, o| match best {
                Some(b) if !better(o, b) => Some(b),
                _ => Some(o),
            },
        )
    };
    let (winner, converged) = match pick(true) {
        Some(w) => (w, true),
        None => (pick(false).expect("at least one start"), false),
    };

    let trajectory = simulate(kind, x0, Some(&winner.controls), p, obj.horizon)?.require_feasible()?;
    let objective_value = objective(&trajectory, obj)?;
    let result = SolveResult {
        controls: ControlSchedule(winner.controls.clone()),
        trajectory,
        adjoints: None,
        objective_value,
        iterations: winner.iterations,
        converged,
    };
    if converged {
        Ok(result)
    } else {
        Err(SolveError::NotConverged(Box::new(result)))
    }
}

/// Solves the Model B control problem.
pub fn solve_direct<F: Scalar>(
    x0: State<F>,
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
    cfg: &OptimizerConfig<F>,
) -> Result<SolveResult<F>, SolveError<F>> {
    solve_direct_for(ModelKind::ModelB, x0, p, obj, cfg)
}
