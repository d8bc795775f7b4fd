use crate::fbsm::AdjointTrajectory;
use crate::model::{ControlSchedule, Trajectory};

/// Outcome of either solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult<F> {
    pub controls: ControlSchedule<F>,
    pub trajectory: Trajectory<F>,
    /// Present for the sweep solver only.
    pub adjoints: Option<AdjointTrajectory<F>>,
    pub objective_value: F,
    pub iterations: usize,
    pub converged: bool,
}
