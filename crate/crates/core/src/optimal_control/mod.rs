//! Performance index `J(u) = \int_0^T L(t, x(t), x_t, u(t)) dt` along mild
//! solutions and its minimization over piecewise constant controls in a box
//! by projected-gradient descent with central difference gradients.

mod convexity;
mod cost;
mod minimize;
mod parameterization;

pub use convexity::{verify_convexity, ConvexityReport, CONVEXITY_SLACK};
pub use cost::{eval_cost, CostDescriptor, CostEvaluator, CostFile};
pub use minimize::{
    minimize, minimize_from, MinimizeOptions, MinimizeOutcome, ParameterizedCost, StopReason,
};
pub use parameterization::ControlParameterization;
