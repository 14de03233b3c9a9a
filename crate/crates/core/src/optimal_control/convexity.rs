use serde::Serialize;

use crate::error::{Error, Result};
use crate::mild_solver::{ControlSignal, MildSolver};
use crate::scalar::Real;
use crate::spectral_model::ProblemSpec;

use super::cost::{CostDescriptor, CostEvaluator, DEFAULT_MAX_ITER};

/// Slack allowed in the midpoint inequality.
pub const CONVEXITY_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityReport {
    /// `J((u1 + u2) / 2)`.
    pub j_mid: f64,
    /// `(J(u1) + J(u2)) / 2`.
    pub j_average: f64,
    pub holds: bool,
}

/// Midpoint convexity of `J` on the pair `(u1, u2)`. Only linear dynamics
/// are accepted, since convexity of `L` in `u` carries over to `J` only
/// through an affine control-to-state map.
pub fn verify_convexity<T: Real>(
    spec: &ProblemSpec<T>,
    cost: &CostDescriptor<T>,
    u1: &ControlSignal<T>,
    u2: &ControlSignal<T>,
    tol: T,
) -> Result<ConvexityReport> {
    if !spec.is_linear() {
        return Err(Error::Refused(
            "convexity of the cost needs an affine nonlinearity; the control-to-state map is not affine".into(),
        ));
    }
    if u1.grid() != u2.grid() {
        return Err(Error::Domain("controls are on different grids".into()));
    }
    let solver = MildSolver::with_grid(spec, *u1.grid())?;
    let evaluator = CostEvaluator::with_solver(solver, *cost, tol, DEFAULT_MAX_ITER);
    let half = T::one() / (T::one() + T::one());
    let j_mid = evaluator.eval(&u1.combine(half, u2, half))?.as_f64();
    let j_average = 0.5 * (evaluator.eval(u1)?.as_f64() + evaluator.eval(u2)?.as_f64());
    Ok(ConvexityReport {
        j_mid,
        j_average,
        holds: j_mid <= j_average + CONVEXITY_SLACK,
    })
}
