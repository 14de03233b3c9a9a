//! Approximate controllability by the regularized resolvent control
//!
//! ```text
//! u(t) = B^T S(T - t)^* (eps I + Gamma)^{-1} p(x),
//! Gamma = \int_0^T S(T - s) B B^T S(T - s)^* ds
//! ```
//!
//! where `p(x)` is the target minus the uncontrolled part of the mild
//! solution at `T`. For a nonlinear or nonlocal problem the pair `(x, u)` is
//! found by alternating control synthesis and state solves.

mod grammian;
mod steering;

pub use grammian::{
    control_from_residual, grammian, residual_p, residual_p_with, synthesize_control, Grammian,
    Resolvent,
};
pub use steering::{
    epsilon_sweep, steer, SteerError, SteerOptions, SteerOutcome, Steering, SteeringReport,
    SweepEntry, SweepOutcome, SweepResult,
};
