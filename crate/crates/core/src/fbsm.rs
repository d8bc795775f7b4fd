//! Forward-backward sweep for Model A.
//!
//! The Model A Hamiltonian
//!
//! ```text
//! H_t = -M1 h^2 - M2 h + lu' [f_u(u)(1 - d1 v) + h f_w(w)]
//!       + lv' (v + f_u(u) d2 v)(1 - gamma) + lw' (1 - h) f_w(w)
//! ```
//!
//! is concave in `h` (second derivative `-2 M1`), so the maximum principle yields a
//! closed-form clamped control. Each sweep runs the states forward, the adjoints
//! backward from `lambda_T = (1, 0, N)`, and moves the control part of the way toward
//! the characterization.

use crate::error::{ModelError, SolveError};
use crate::model::{objective, simulate, ControlSchedule, ModelKind, ModelParams, ObjectiveParams, State, Trajectory};
use crate::scalar::{blend, clamp};
use crate::solution::SolveResult;
use crate::Scalar;

/// Adjoint triple `(lambda_u, lambda_v, lambda_w)` at one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Costate<F> {
    pub prey: F,
    pub predator: F,
    pub reserve: F,
}

impl<F: Scalar> Costate<F> {
    pub fn new(prey: F, predator: F, reserve: F) -> Self {
        Self {
            prey,
            predator,
            reserve,
        }
    }

    /// Transversality values `(1, 0, N)`.
    pub fn terminal(obj: &ObjectiveParams<F>) -> Self {
        Self::new(F::one(), F::zero(), obj.reserve_weight)
    }
}

/// Adjoint sequences of length `T + 1`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AdjointTrajectory<F> {
    pub lambda_u: Vec<F>,
    pub lambda_v: Vec<F>,
    pub lambda_w: Vec<F>,
}

impl<F: Scalar> AdjointTrajectory<F> {
    pub fn len(&self) -> usize {
        self.lambda_u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda_u.is_empty()
    }

    pub fn at(&self, t: usize) -> Costate<F> {
        Costate::new(self.lambda_u[t], self.lambda_v[t], self.lambda_w[t])
    }
}

/// Relaxation, tolerance and iteration cap of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig<F> {
    /// Weight on the characterization in `h_new = r h_char + (1 - r) h_old`.
    pub relaxation: F,
    pub tol: F,
    pub max_iter: usize,
}

impl<F: Scalar> Default for SweepConfig<F> {
    fn default() -> Self {
        Self {
            relaxation: F::lit(0.2),
            tol: F::lit(1e-3),
            max_iter: 1000,
        }
    }
}

impl<F: Scalar> SweepConfig<F> {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.relaxation > F::zero() && self.relaxation <= F::one()) {
            return Err(ModelError::invalid("relaxation", "must lie in (0, 1]"));
        }
        if !(self.tol > F::zero()) {
            return Err(ModelError::invalid("tol", "must be positive"));
        }
        if self.max_iter < 1 {
            return Err(ModelError::invalid("max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

/// Bracket `s(1 - u/k)(u/k - m) + 1` and its derivative in `u`.
#[inline]
fn prey_factor<F: Scalar>(u: F, p: &ModelParams<F>) -> (F, F) {
    let (s, k, m) = (p.prey_growth_rate, p.prey_capacity, p.prey_allee);
    let value = s * (F::one() - u / k) * (u / k - m) + F::one();
    let slope = s / k * (F::one() - u / k) - s / k * (u / k - m);
    (value, slope)
}

#[inline]
fn reserve_factor<F: Scalar>(w: F, p: &ModelParams<F>) -> (F, F) {
    let (q, k, n) = (p.reserve_growth_rate, p.reserve_capacity, p.reserve_allee);
    let value = q * (F::one() - w / k) * (w / k - n) + F::one();
    let slope = q / k * (F::one() - w / k) - q / k * (w / k - n);
    (value, slope)
}

/// One backward step of the Model A adjoint recursion, `lambda_t` from `lambda_{t+1}`.
pub fn adjoint_step<F: Scalar>(x: &State<F>, h: F, next: &Costate<F>, p: &ModelParams<F>) -> Costate<F> {
    let (u, v, w) = (x.prey, x.predator, x.reserve);
    let one = F::one();
    let (d1, d2, keep) = (p.predation_rate, p.conversion_rate, one - p.predator_decay);
    let (bu, du) = prey_factor(u, p);
    let (bw, dw) = reserve_factor(w, p);

    let lambda_u = ((one - d1 * v) * next.prey + d2 * v * keep * next.predator) * bu
        + (u * (one - d1 * v) * next.prey + u * d2 * v * keep * next.predator) * du;
    let lambda_v = -next.prey * u * bu * d1 + next.predator * (one + u * bu * d2) * keep;
    let mixed = h * next.prey + (one - h) * next.reserve;
    let lambda_w = mixed * bw + w * mixed * dw;
    Costate::new(lambda_u, lambda_v, lambda_w)
}

/// Backward pass from transversality over the states of `traj`.
pub fn backward_sweep<F: Scalar>(
    traj: &Trajectory<F>,
    controls: &[F],
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
) -> AdjointTrajectory<F> {
    let horizon = traj.horizon();
    debug_assert_eq!(controls.len(), horizon);
    let mut lam = vec![Costate::default(); horizon + 1];
    lam[horizon] = Costate::terminal(obj);
    for t in (0..horizon).rev() {
        lam[t] = adjoint_step(&traj.states[t], controls[t], &lam[t + 1], p);
    }
    AdjointTrajectory {
        lambda_u: lam.iter().map(|c| c.prey).collect(),
        lambda_v: lam.iter().map(|c| c.predator).collect(),
        lambda_w: lam.iter().map(|c| c.reserve).collect(),
    }
}

/// Unclamped stationary point of the Hamiltonian in `h`.
#[inline]
fn stationary_control<F: Scalar>(
    w: F,
    lam_u_next: F,
    lam_w_next: F,
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
) -> F {
    let (bw, _) = reserve_factor(w, p);
    ((lam_u_next - lam_w_next) * bw * w - obj.linear_cost) / (F::two() * obj.quadratic_cost)
}

/// Optimal control at one step: the stationary point clamped into `[0, A]`.
pub fn characterize_control<F: Scalar>(
    w: F,
    lam_u_next: F,
    lam_w_next: F,
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
) -> F {
    clamp(
        stationary_control(w, lam_u_next, lam_w_next, p, obj),
        F::zero(),
        obj.max_effort,
    )
}

/// `dH_t/dh_t = -2 M1 h - M2 + (lambda_u' - lambda_w') f_w(w)`.
///
/// Evaluated along the trajectory generated by `h`, this equals `dJ/dh_t`.
pub fn control_gradient<F: Scalar>(w: F, h: F, next: &Costate<F>, p: &ModelParams<F>, obj: &ObjectiveParams<F>) -> F {
    let (bw, _) = reserve_factor(w, p);
    -F::two() * obj.quadratic_cost * h - obj.linear_cost + (next.prey - next.reserve) * bw * w
}

/// Model A Hamiltonian `H_t`.
pub fn hamiltonian_a<F: Scalar>(
    x: &State<F>,
    h: F,
    next: &Costate<F>,
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
) -> F {
    let (u, v, w) = (x.prey, x.predator, x.reserve);
    let one = F::one();
    let (bu, _) = prey_factor(u, p);
    let (bw, _) = reserve_factor(w, p);
    -obj.quadratic_cost * h * h - obj.linear_cost * h
        + next.prey * (u * bu * (one - p.predation_rate * v))
        + next.prey * (h * w * bw)
        + next.predator * ((v + u * bu * p.conversion_rate * v) * (one - p.predator_decay))
        + next.reserve * ((w - h * w) * bw)
}

/// Per-step gradient of `J` for an arbitrary control schedule, via one forward and one
/// backward pass.
pub fn objective_gradient_a<F: Scalar>(
    controls: &[F],
    x0: State<F>,
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
) -> Result<Vec<F>, ModelError> {
    let traj = simulate(ModelKind::ModelA, x0, Some(controls), p, obj.horizon)?.require_feasible()?;
    let lam = backward_sweep(&traj, controls, p, obj);
    Ok((0..obj.horizon)
        .map(|t| control_gradient(traj.states[t].reserve, controls[t], &lam.at(t + 1), p, obj))
        .collect())
}

/// Relative closeness test `tol * sum|new| - sum|new - old| >= 0`.
fn close<F: Scalar>(new: impl Iterator<Item = F> + Clone, old: impl Iterator<Item = F>, tol: F) -> bool {
    let scale: F = new.clone().map(F::abs).sum();
    let diff: F = new.zip(old).map(|(a, b)| (a - b).abs()).sum();
    tol * scale - diff >= F::zero()
}

fn states_close<F: Scalar>(new: &[State<F>], old: &[State<F>], tol: F) -> bool {
    close(new.iter().map(|x| x.prey), old.iter().map(|x| x.prey), tol)
        && close(new.iter().map(|x| x.predator), old.iter().map(|x| x.predator), tol)
        && close(new.iter().map(|x| x.reserve), old.iter().map(|x| x.reserve), tol)
}

fn adjoints_close<F: Scalar>(new: &AdjointTrajectory<F>, old: &AdjointTrajectory<F>, tol: F) -> bool {
    close(new.lambda_u.iter().copied(), old.lambda_u.iter().copied(), tol)
        && close(new.lambda_v.iter().copied(), old.lambda_v.iter().copied(), tol)
        && close(new.lambda_w.iter().copied(), old.lambda_w.iter().copied(), tol)
}

/// Solves the Model A control problem by the discrete forward-backward sweep.
///
/// Starts from the all-zero schedule. Each iteration replaces `h` by
/// `r h_char + (1 - r) h`, re-runs both passes, and stops once controls, states and
/// adjoints all pass the relative closeness test against the previous iterate.
pub fn solve_fbsm<F: Scalar>(
    x0: State<F>,
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
    cfg: &SweepConfig<F>,
) -> Result<SolveResult<F>, SolveError<F>> {
    x0.validate()?;
    obj.check_solvable()?;
    cfg.validate()?;
    if !(obj.quadratic_cost > F::zero()) {
        return Err(ModelError::invalid("M1", "must be positive for the sweep").into());
    }
    let horizon = obj.horizon;

    let mut controls = vec![F::zero(); horizon];
    let mut traj = simulate(ModelKind::ModelA, x0, Some(&controls), p, horizon)?.require_feasible()?;
    let mut lam = backward_sweep(&traj, &controls, p, obj);

    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        iterations += 1;
        let updated: Vec<F> = (0..horizon)
            .map(|t| {
                let target =
                    characterize_control(traj.states[t].reserve, lam.lambda_u[t + 1], lam.lambda_w[t + 1], p, obj);
                blend(cfg.relaxation, target, controls[t])
            })
            .collect();
        let next_traj = simulate(ModelKind::ModelA, x0, Some(&updated), p, horizon)?.require_feasible()?;
        let next_lam = backward_sweep(&next_traj, &updated, p, obj);

        converged = close(updated.iter().copied(), controls.iter().copied(), cfg.tol)
            && states_close(&next_traj.states, &traj.states, cfg.tol)
            && adjoints_close(&next_lam, &lam, cfg.tol);

        controls = updated;
        traj = next_traj;
        lam = next_lam;
        if converged {
            break;
        }
    }

    let objective_value = objective(&traj, obj)?;
    let result = SolveResult {
        controls: ControlSchedule(controls),
        trajectory: traj,
        adjoints: Some(lam),
        objective_value,
        iterations,
        converged,
    };
    if converged {
        Ok(result)
    } else {
        Err(SolveError::NotConverged(Box::new(result)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{no_control_objective, step_model_a, terminal_payoff};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn base() -> (ModelParams<f64>, ObjectiveParams<f64>, State<f64>) {
        (
            ModelParams::baseline(),
            ObjectiveParams::baseline(),
            State::new(0.2, 0.5, 0.7),
        )
    }

    fn j_of(h: &[f64], x0: State<f64>, p: &ModelParams<f64>, obj: &ObjectiveParams<f64>) -> f64 {
        let traj = simulate(ModelKind::ModelA, x0, Some(h), p, obj.horizon).unwrap();
        objective(&traj, obj).unwrap()
    }

    /// Payoff-to-go from state `x` at step `t`, controls fixed.
    fn payoff_from(x: State<f64>, t: usize, h: &[f64], p: &ModelParams<f64>, obj: &ObjectiveParams<f64>) -> f64 {
        let mut x = x;
        for &ht in &h[t..] {
            x = step_model_a(&x, ht, p);
        }
        terminal_payoff(&x, obj)
    }

    #[test]
    fn zero_costate_maps_to_zero() {
        let (p, _, x0) = base();
        let lam = adjoint_step(&x0, 0.3, &Costate::default(), &p);
        assert_eq!(lam, Costate::default());
    }

    #[test]
    fn last_step_with_no_predator() {
        let (p, obj, _) = base();
        let x = State::new(0.3, 0.0, 0.6);
        let lam = adjoint_step(&x, 0.0, &Costate::terminal(&obj), &p);
        let u = x.prey;
        let bracket = p.prey_growth_rate * (1.0 - u / p.prey_capacity) * (u / p.prey_capacity - p.prey_allee) + 1.0;
        assert!((lam.predator - (-u * bracket * p.predation_rate)).abs() < 1e-15);
    }

    #[test]
    fn adjoint_is_linear_in_next_costate() {
        let (p, _, _) = base();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x = State::new(
                rng.gen_range(0.0..0.6),
                rng.gen_range(0.0..1.0),
                rng.gen_range(0.0..0.9),
            );
            let h = rng.gen_range(0.0..0.7);
            let a = Costate::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let b = Costate::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let (alpha, beta) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let mix = Costate::new(
                alpha * a.prey + beta * b.prey,
                alpha * a.predator + beta * b.predator,
                alpha * a.reserve + beta * b.reserve,
            );
            let la = adjoint_step(&x, h, &a, &p);
            let lb = adjoint_step(&x, h, &b, &p);
            let lm = adjoint_step(&x, h, &mix, &p);
            for (m, (ea, eb)) in [
                (lm.prey, (la.prey, lb.prey)),
                (lm.predator, (la.predator, lb.predator)),
                (lm.reserve, (la.reserve, lb.reserve)),
            ] {
                assert!((m - (alpha * ea + beta * eb)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn characterization_clamps() {
        let (p, obj, _) = base();
        assert_eq!(characterize_control(0.6, 0.8, 0.8, &p, &obj), 0.0);
        assert_eq!(characterize_control(0.0, 1.0, 0.2, &p, &obj), 0.0);
        let free = ObjectiveParams {
            linear_cost: 0.0,
            ..obj
        };
        assert_eq!(characterize_control(0.0, 1.0, 0.2, &p, &free), 0.0);
        assert_eq!(characterize_control(0.7, 1e6, 0.0, &p, &obj), obj.max_effort);
        let flat = ObjectiveParams { max_effort: 0.0, ..obj };
        assert_eq!(characterize_control(0.7, 5.0, 0.0, &p, &flat), 0.0);
    }

    #[test]
    fn hamiltonian_is_concave_in_control() {
        let (p, obj, x0) = base();
        let lam = Costate::new(0.9, -0.3, 0.4);
        let step = 1e-3;
        for &h in &[0.05, 0.3, 0.6] {
            let second = (hamiltonian_a(&x0, h + step, &lam, &p, &obj) - 2.0 * hamiltonian_a(&x0, h, &lam, &p, &obj)
                + hamiltonian_a(&x0, h - step, &lam, &p, &obj))
                / (step * step);
            assert!((second + 2.0 * obj.quadratic_cost).abs() < 1e-6, "{second}");
        }
        assert_eq!(hamiltonian_a(&x0, 0.0, &Costate::default(), &p, &obj), 0.0);
    }

    #[test]
    fn analytic_gradient_matches_central_differences() {
        let (p, obj, x0) = base();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let eps = 1e-6;
        for _ in 0..20 {
            let h: Vec<f64> = (0..obj.horizon).map(|_| rng.gen_range(0.0..obj.max_effort)).collect();
            let grad = objective_gradient_a(&h, x0, &p, &obj).unwrap();
            for t in 0..obj.horizon {
                let mut hp = h.clone();
                let mut hm = h.clone();
                hp[t] += eps;
                hm[t] -= eps;
                let fd = (j_of(&hp, x0, &p, &obj) - j_of(&hm, x0, &p, &obj)) / (2.0 * eps);
                assert!(
                    (grad[t] - fd).abs() <= 1e-4 * fd.abs().max(1e-6),
                    "t={t} {} vs {fd}",
                    grad[t]
                );
            }
        }
    }

    #[test]
    fn adjoints_are_state_sensitivities() {
        let (p, obj, x0) = base();
        let strict = SweepConfig {
            tol: 1e-10,
            ..SweepConfig::default()
        };
        let sol = solve_fbsm(x0, &p, &obj, &strict).unwrap();
        let lam = sol.adjoints.as_ref().unwrap();
        let h = sol.controls.as_slice();
        let eps = 1e-6;
        for t in [5, 3, 0] {
            let x = sol.trajectory.states[t];
            let bump = |du: f64, dv: f64, dw: f64| {
                payoff_from(State::new(x.prey + du, x.predator + dv, x.reserve + dw), t, h, &p, &obj)
            };
            let fd = [
                (bump(eps, 0.0, 0.0) - bump(-eps, 0.0, 0.0)) / (2.0 * eps),
                (bump(0.0, eps, 0.0) - bump(0.0, -eps, 0.0)) / (2.0 * eps),
                (bump(0.0, 0.0, eps) - bump(0.0, 0.0, -eps)) / (2.0 * eps),
            ];
            let analytic = lam.at(t);
            for (a, f) in [analytic.prey, analytic.predator, analytic.reserve].into_iter().zip(fd) {
                assert!((a - f).abs() <= 1e-4 * f.abs().max(1e-6), "t={t}: {a} vs {f}");
            }
        }
    }

    #[test]
    fn converged_sweep_is_a_fixed_point() {
        let (p, obj, x0) = base();
        let strict = SweepConfig {
            tol: 1e-10,
            ..SweepConfig::default()
        };
        let sol = solve_fbsm(x0, &p, &obj, &strict).unwrap();
        let lam = sol.adjoints.as_ref().unwrap();
        assert_eq!(lam.at(obj.horizon), Costate::terminal(&obj));
        for t in 0..obj.horizon {
            let w = sol.trajectory.states[t].reserve;
            let h_char = characterize_control(w, lam.lambda_u[t + 1], lam.lambda_w[t + 1], &p, &obj);
            let h = sol.controls.0[t];
            assert!((h_char - h).abs() < 1e-8, "t={t}: {h_char} vs {h}");
            if h > 1e-4 && h < obj.max_effort - 1e-4 {
                let d = 1e-6;
                let next = lam.at(t + 1);
                let x = &sol.trajectory.states[t];
                let slope =
                    (hamiltonian_a(x, h + d, &next, &p, &obj) - hamiltonian_a(x, h - d, &next, &p, &obj)) / (2.0 * d);
                assert!(slope.abs() < 1e-6, "t={t}: dH/dh = {slope}");
            }
        }
        assert!((sol.objective_value - objective(&sol.trajectory, &obj).unwrap()).abs() == 0.0);
        assert!(sol.controls.validate(obj.max_effort).is_ok());
    }

    #[test]
    fn zero_bound_gives_no_control() {
        let (p, obj, x0) = base();
        let obj = ObjectiveParams { max_effort: 0.0, ..obj };
        let sol = solve_fbsm(x0, &p, &obj, &SweepConfig::default()).unwrap();
        assert!(sol.controls.0.iter().all(|&h| h == 0.0));
        assert_eq!(sol.objective_value, no_control_objective(x0, &p, &obj).unwrap());
    }

    #[test]
    fn iteration_cap_reports_last_iterate() {
        let (p, obj, x0) = base();
        let cfg = SweepConfig {
            max_iter: 2,
            tol: 1e-12,
            ..SweepConfig::default()
        };
        let err = solve_fbsm(x0, &p, &obj, &cfg).unwrap_err();
        let last = err.last_iterate().expect("payload");
        assert_eq!(last.iterations, 2);
        assert!(!last.converged);
    }

    #[test]
    fn rejects_bad_config() {
        let (p, obj, x0) = base();
        let cfg = SweepConfig {
            relaxation: 0.0,
            ..SweepConfig::default()
        };
        assert!(matches!(
            solve_fbsm(x0, &p, &obj, &cfg),
            Err(SolveError::Model(ModelError::Validation {
                field: "relaxation",
                ..
            }))
        ));
    }
}
