//! Mild solutions on `[-r, T]` by Picard iteration on the integral form
//!
//! ```text
//! x(t) = S(t) (phi(0) - g(x)(0)) + sum_{0 < t_k < t} S(t - t_k) I_k(x(t_k^-))
//!        + \int_0^t S(t - s) [B u(s) + f(s, x(s), x_s)] ds,   t in [0, T]
//! x(s) = phi(s) - g(x)(s),                                    s in [-r, 0]
//! ```
//!
//! on a uniform grid with impulse times and nonlocal anchors on nodes. The
//! convolution uses the composite trapezoid rule with the solution operator
//! tabulated at every lag.

mod control;
mod grid;
mod kernel;
mod solver;
mod trajectory;

pub use control::ControlSignal;
pub use grid::TimeGrid;
pub use kernel::KernelTable;
pub use solver::{
    contraction_check, contraction_factor, convolve, inner_factor, solve_mild, MildSolver,
    NodePairs, SolveOutcome,
};
pub use trajectory::{JumpRecord, Trajectory};
