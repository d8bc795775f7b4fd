//! Discrete-time optimal control of species augmentation in a predator-prey-reserve
//! system.
//!
//! * [`model`]: dynamics, trajectories and the objective.
//! * [`fbsm`]: forward-backward sweep with analytic adjoints (Model A).
//! * [`direct`]: box-constrained direct maximization (Model B).
//! * [`scenario`]: scenario catalog, config files, reports and CSV output.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the common precisions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod direct;
pub mod error;
pub mod fbsm;
pub mod model;
mod scalar;
pub mod scenario;
pub mod solution;

pub use error::{ModelError, SolveError};
pub use scalar::Scalar;

pub type ModelParams64 = model::ModelParams<f64>;
pub type ObjectiveParams64 = model::ObjectiveParams<f64>;
pub type State64 = model::State<f64>;
pub type ControlSchedule64 = model::ControlSchedule<f64>;
pub type Trajectory64 = model::Trajectory<f64>;
pub type AdjointTrajectory64 = fbsm::AdjointTrajectory<f64>;
pub type SweepConfig64 = fbsm::SweepConfig<f64>;
pub type OptimizerConfig64 = direct::OptimizerConfig<f64>;
pub type SolveResult64 = solution::SolveResult<f64>;

pub type ModelParams32 = model::ModelParams<f32>;
pub type ObjectiveParams32 = model::ObjectiveParams<f32>;
pub type State32 = model::State<f32>;
pub type SolveResult32 = solution::SolveResult<f32>;
