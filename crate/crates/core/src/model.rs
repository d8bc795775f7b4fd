//! Predator-prey-reserve dynamics and the augmentation objective.
//!
//! Populations are real numbers in units of 1000 individuals. Within one step the
//! prey grows under a strong Allee effect, predation acts, and the predator decays.
//! The reserve grows independently under its own Allee effect. The two controlled
//! variants differ only in when the translocation of a proportion `h` of the
//! reserve into the prey population happens:
//!
//! * [`ModelKind::ModelA`]: grow, then predation, then move part of the *grown* reserve.
//! * [`ModelKind::ModelB`]: move first, then grow, then predation.

use crate::error::ModelError;
use crate::Scalar;

/// Ecological rate constants of the three populations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<F> {
    /// Prey intrinsic growth rate `s`.
    pub prey_growth_rate: F,
    /// Prey carrying capacity `k_u`.
    pub prey_capacity: F,
    /// Prey Allee constant `m`; the Allee threshold is `m * k_u`.
    pub prey_allee: F,
    /// Prey consumed per predator unit, `delta1`.
    pub predation_rate: F,
    /// Predator gain per prey unit, `delta2`.
    pub conversion_rate: F,
    /// Predator natural decay proportion, `gamma`.
    pub predator_decay: F,
    /// Reserve intrinsic growth rate `q`.
    pub reserve_growth_rate: F,
    /// Reserve carrying capacity `k_w`.
    pub reserve_capacity: F,
    /// Reserve Allee constant `n`; the Allee threshold is `n * k_w`.
    pub reserve_allee: F,
}

impl<F: Scalar> ModelParams<F> {
    /// Baseline parameter set used by the built-in scenarios.
    pub fn baseline() -> Self {
        Self {
            prey_growth_rate: F::lit(0.25),
            prey_capacity: F::lit(0.5),
            prey_allee: F::lit(0.25),
            predation_rate: F::lit(0.4),
            conversion_rate: F::lit(0.5),
            predator_decay: F::lit(0.025),
            reserve_growth_rate: F::lit(0.85),
            reserve_capacity: F::lit(0.8),
            reserve_allee: F::lit(0.25),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        positive("s", self.prey_growth_rate)?;
        positive("k_u", self.prey_capacity)?;
        unit_open("m", self.prey_allee)?;
        positive("delta1", self.predation_rate)?;
        positive("delta2", self.conversion_rate)?;
        unit_open("gamma", self.predator_decay)?;
        positive("q", self.reserve_growth_rate)?;
        positive("k_w", self.reserve_capacity)?;
        unit_open("n", self.reserve_allee)?;
        Ok(())
    }

    pub fn prey_threshold(&self) -> F {
        self.prey_allee * self.prey_capacity
    }

    pub fn reserve_threshold(&self) -> F {
        self.reserve_allee * self.reserve_capacity
    }
}

/// Horizon, payoff weight, translocation costs and the control bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveParams<F> {
    /// Number of steps `T`.
    pub horizon: usize,
    /// Terminal weight `N` on the reserve.
    pub reserve_weight: F,
    /// Quadratic cost constant `M1`.
    pub quadratic_cost: F,
    /// Linear cost constant `M2`.
    pub linear_cost: F,
    /// Maximum proportion `A` of the reserve moved in one step.
    pub max_effort: F,
}

impl<F: Scalar> ObjectiveParams<F> {
    pub fn baseline() -> Self {
        Self {
            horizon: 6,
            reserve_weight: F::lit(0.5),
            quadratic_cost: F::lit(0.4),
            linear_cost: F::lit(0.15),
            max_effort: F::lit(0.7),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.horizon < 1 {
            return Err(ModelError::invalid("T", "horizon must be at least 1"));
        }
        unit_open("N", self.reserve_weight)?;
        positive("M1", self.quadratic_cost)?;
        if !(self.linear_cost >= F::zero()) || !self.linear_cost.is_finite() {
            return Err(ModelError::invalid("M2", "must be finite and >= 0"));
        }
        if !(self.max_effort > F::zero() && self.max_effort <= F::one()) {
            return Err(ModelError::invalid("A", "must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Translocation cost `M1 h^2 + M2 h` of a single step.
    #[inline]
    pub fn step_cost(&self, h: F) -> F {
        self.quadratic_cost * h * h + self.linear_cost * h
    }

    /// Solvers accept the degenerate `A = 0` box and any `N >= 0`, unlike `validate`.
    pub(crate) fn check_solvable(&self) -> Result<(), ModelError> {
        if self.horizon < 1 {
            return Err(ModelError::invalid("T", "horizon must be at least 1"));
        }
        if !(self.max_effort >= F::zero() && self.max_effort <= F::one()) {
            return Err(ModelError::invalid("A", "must lie in [0, 1]"));
        }
        if !(self.linear_cost >= F::zero()) || !self.linear_cost.is_finite() {
            return Err(ModelError::invalid("M2", "must be finite and >= 0"));
        }
        if !(self.reserve_weight >= F::zero()) || !self.reserve_weight.is_finite() {
            return Err(ModelError::invalid("N", "must be finite and >= 0"));
        }
        Ok(())
    }
}

fn positive<F: Scalar>(field: &'static str, x: F) -> Result<(), ModelError> {
    if x > F::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(ModelError::invalid(field, format!("must be positive, got {x}")))
    }
}

fn unit_open<F: Scalar>(field: &'static str, x: F) -> Result<(), ModelError> {
    if x > F::zero() && x < F::one() {
        Ok(())
    } else {
        Err(ModelError::invalid(field, format!("must lie in (0, 1), got {x}")))
    }
}

/// Population triple at one time step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State<F> {
    pub prey: F,
    pub predator: F,
    pub reserve: F,
}

impl<F: Scalar> State<F> {
    pub fn new(prey: F, predator: F, reserve: F) -> Self {
        Self {
            prey,
            predator,
            reserve,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, x) in [("u0", self.prey), ("v0", self.predator), ("w0", self.reserve)] {
            if !(x >= F::zero()) || !x.is_finite() {
                return Err(ModelError::invalid(field, format!("must be finite and >= 0, got {x}")));
            }
        }
        Ok(())
    }

    /// True when `delta1 * v > 1`, i.e. the next prey value would be negative.
    pub fn predation_infeasible(&self, p: &ModelParams<F>) -> bool {
        p.predation_rate * self.predator > F::one()
    }
}

/// Translocation proportions `h_0 .. h_{T-1}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlSchedule<F>(pub Vec<F>);

impl<F: Scalar> ControlSchedule<F> {
    pub fn zeros(horizon: usize) -> Self {
        Self(vec![F::zero(); horizon])
    }

    pub fn constant(horizon: usize, value: F) -> Self {
        Self(vec![value; horizon])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[F] {
        &self.0
    }

    /// Checks `0 <= h_t <= bound` for every entry.
    pub fn validate(&self, bound: F) -> Result<(), ModelError> {
        match self.0.iter().position(|&h| !(h >= F::zero() && h <= bound)) {
            None => Ok(()),
            Some(t) => Err(ModelError::invalid(
                "h",
                format!("h_{t} = {} outside [0, {bound}]", self.0[t]),
            )),
        }
    }
}

impl<F> From<Vec<F>> for ControlSchedule<F> {
    fn from(v: Vec<F>) -> Self {
        Self(v)
    }
}

/// Which step map generated a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Uncontrolled,
    ModelA,
    ModelB,
}

impl ModelKind {
    pub fn step<F: Scalar>(self, x: &State<F>, h: F, p: &ModelParams<F>) -> State<F> {
        match self {
            ModelKind::Uncontrolled => step_uncontrolled(x, p),
            ModelKind::ModelA => step_model_a(x, h, p),
            ModelKind::ModelB => step_model_b(x, h, p),
        }
    }
}

/// `T + 1` states plus the controls that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<F> {
    pub states: Vec<State<F>>,
    pub controls: Option<ControlSchedule<F>>,
    pub kind: ModelKind,
    /// Steps `t` at which `delta1 * v_t > 1`.
    pub infeasible_steps: Vec<usize>,
}

impl<F: Scalar> Trajectory<F> {
    pub fn horizon(&self) -> usize {
        self.states.len() - 1
    }

    pub fn initial(&self) -> &State<F> {
        &self.states[0]
    }

    pub fn terminal(&self) -> &State<F> {
        self.states.last().expect("trajectory holds at least x0")
    }

    /// Fails with the first infeasible step, if any.
    pub fn require_feasible(self) -> Result<Self, ModelError> {
        match self.infeasible_steps.first() {
            Some(&step) => Err(ModelError::InfeasibleRegime { step }),
            None => Ok(self),
        }
    }
}

/// Prey growth `f_u(u) = s u (1 - u/k_u)(u/k_u - m) + u`.
#[inline]
pub fn growth_u<F: Scalar>(u: F, p: &ModelParams<F>) -> F {
    let k = p.prey_capacity;
    p.prey_growth_rate * u * (F::one() - u / k) * (u / k - p.prey_allee) + u
}

/// Predator decay `f_v(v) = (1 - gamma) v`.
#[inline]
pub fn decay_v<F: Scalar>(v: F, p: &ModelParams<F>) -> F {
    (F::one() - p.predator_decay) * v
}

/// Reserve growth `f_w(w) = q w (1 - w/k_w)(w/k_w - n) + w`.
#[inline]
pub fn growth_w<F: Scalar>(w: F, p: &ModelParams<F>) -> F {
    let k = p.reserve_capacity;
    p.reserve_growth_rate * w * (F::one() - w / k) * (w / k - p.reserve_allee) + w
}

/// Predation on already-grown prey `grown`, then predator decay.
#[inline]
fn predation<F: Scalar>(grown: F, v: F, p: &ModelParams<F>) -> (F, F) {
    let prey = grown * (F::one() - p.predation_rate * v);
    let predator = decay_v(v + grown * p.conversion_rate * v, p);
    (prey, predator)
}

pub fn step_uncontrolled<F: Scalar>(x: &State<F>, p: &ModelParams<F>) -> State<F> {
    let (prey, predator) = predation(growth_u(x.prey, p), x.predator, p);
    State::new(prey, predator, growth_w(x.reserve, p))
}

/// Grow, predation, then move proportion `h` of the grown reserve into the prey.
pub fn step_model_a<F: Scalar>(x: &State<F>, h: F, p: &ModelParams<F>) -> State<F> {
    let (prey, predator) = predation(growth_u(x.prey, p), x.predator, p);
    let grown_reserve = growth_w(x.reserve, p);
    State::new(prey + h * grown_reserve, predator, (F::one() - h) * grown_reserve)
}

/// Move proportion `h` of the reserve into the prey, then grow, then predation.
pub fn step_model_b<F: Scalar>(x: &State<F>, h: F, p: &ModelParams<F>) -> State<F> {
    let moved = h * x.reserve;
    let prey_aug = x.prey + moved;
    let reserve_left = x.reserve - moved;
    let (prey, predator) = predation(growth_u(prey_aug, p), x.predator, p);
    State::new(prey, predator, growth_w(reserve_left, p))
}

/// Iterates the step map of `kind` for `horizon` steps from `x0`.
///
/// `controls` may be `None` only for [`ModelKind::Uncontrolled`]; when given it must
/// hold exactly `horizon` entries. Control values are not range-checked here, which
/// lets finite-difference probes step slightly outside the admissible box.
pub fn simulate<F: Scalar>(
    kind: ModelKind,
    x0: State<F>,
    controls: Option<&[F]>,
    p: &ModelParams<F>,
    horizon: usize,
) -> Result<Trajectory<F>, ModelError> {
    if let Some(h) = controls {
        if h.len() != horizon {
            return Err(ModelError::LengthMismatch {
                expected: horizon,
                actual: h.len(),
            });
        }
    } else if kind != ModelKind::Uncontrolled {
        return Err(ModelError::LengthMismatch {
            expected: horizon,
            actual: 0,
        });
    }

    let mut states = Vec::with_capacity(horizon + 1);
    let mut infeasible_steps = Vec::new();
    states.push(x0);
    let mut x = x0;
    for t in 0..horizon {
        if x.predation_infeasible(p) {
            infeasible_steps.push(t);
        }
        let h = controls.map_or(F::zero(), |c| c[t]);
        x = kind.step(&x, h, p);
        states.push(x);
    }
    Ok(Trajectory {
        states,
        controls: controls.map(|c| ControlSchedule(c.to_vec())),
        kind,
        infeasible_steps,
    })
}

/// `J(h) = u_T + N w_T - sum_t (M1 h_t^2 + M2 h_t)`.
///
/// A trajectory without recorded controls is scored with an all-zero schedule.
pub fn objective<F: Scalar>(traj: &Trajectory<F>, obj: &ObjectiveParams<F>) -> Result<F, ModelError> {
    let horizon = traj.horizon();
    let cost = match &traj.controls {
        Some(c) if c.len() != horizon => {
            return Err(ModelError::LengthMismatch {
                expected: horizon,
                actual: c.len(),
            })
        }
        Some(c) => c.0.iter().map(|&h| obj.step_cost(h)).sum(),
        None => F::zero(),
    };
    Ok(terminal_payoff(traj.terminal(), obj) - cost)
}

/// `u_T + N w_T`.
#[inline]
pub fn terminal_payoff<F: Scalar>(x: &State<F>, obj: &ObjectiveParams<F>) -> F {
    x.prey + obj.reserve_weight * x.reserve
}

/// Objective of the uncontrolled trajectory, `J(0)`.
pub fn no_control_objective<F: Scalar>(
    x0: State<F>,
    p: &ModelParams<F>,
    obj: &ObjectiveParams<F>,
) -> Result<F, ModelError> {
    let traj = simulate(ModelKind::Uncontrolled, x0, None, p, obj.horizon)?.require_feasible()?;
    objective(&traj, obj)
}
