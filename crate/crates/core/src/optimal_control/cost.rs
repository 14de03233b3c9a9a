use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mild_solver::{ControlSignal, MildSolver, Trajectory};
use crate::scalar::{lit, Real};
use crate::spectral_model::ProblemSpec;

/// Quadratic running cost
///
/// ```text
/// L(t, x, x_t, u) = w_x ||x||^2 + w_h ||x_t||_r^2 + w_u ||u||^2
/// ```
///
/// together with the coercivity data `L >= M2 + d ||x|| + e ||x_t||_r + f ||u||^2`,
/// which is verified when the descriptor is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostDescriptor<T> {
    state_weight: T,
    history_weight: T,
    control_weight: T,
    d: T,
    e: T,
    f: T,
    m2: T,
}

impl<T: Real> CostDescriptor<T> {
    pub fn new(state_weight: T, history_weight: T, control_weight: T) -> Result<Self> {
        Self::with_coercivity(state_weight, history_weight, control_weight, T::zero(), T::zero(), T::one(), T::zero())
    }

    /// Weights plus coercivity constants `d, e, f` and the floor `M2`.
    pub fn with_coercivity(
        state_weight: T,
        history_weight: T,
        control_weight: T,
        d: T,
        e: T,
        f: T,
        m2: T,
    ) -> Result<Self> {
        let all = [state_weight, history_weight, control_weight, d, e, f, m2];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("cost constants must be finite".into()));
        }
        if state_weight < T::zero() || history_weight < T::zero() || control_weight < T::zero() {
            return Err(Error::Config("cost weights must be non-negative".into()));
        }
        let cost = Self {
            state_weight,
            history_weight,
            control_weight,
            d,
            e,
            f,
            m2,
        };
        if !(m2 <= cost.bound_floor()) || control_weight < f {
            return Err(Error::Config(format!(
                "running cost does not dominate {m2} + {d} |x| + {e} |x_t| + {f} |u|^2"
            )));
        }
        Ok(cost)
    }

    /// `||x||^2 + ||x_t||_r^2 + ||u||^2`.
    pub fn quadratic() -> Self {
        Self::new(T::one(), T::one(), T::one()).expect("unit weights dominate the default bound")
    }

    pub fn state_weight(&self) -> T {
        self.state_weight
    }

    pub fn history_weight(&self) -> T {
        self.history_weight
    }

    pub fn control_weight(&self) -> T {
        self.control_weight
    }

    /// `(d, e, f, M2)`.
    pub fn coercivity(&self) -> (T, T, T, T) {
        (self.d, self.e, self.f, self.m2)
    }

    /// `inf_s (w s^2 - c s)` summed over the state and history terms.
    fn bound_floor(&self) -> T {
        let term = |w: T, c: T| {
            if c <= T::zero() {
                T::zero()
            } else if w > T::zero() {
                -c * c / (lit::<T>(4.0) * w)
            } else {
                T::neg_infinity()
            }
        };
        term(self.state_weight, self.d) + term(self.history_weight, self.e)
    }

    /// `L` given `||x||`, `||x_t||_r` and `||u||^2`.
    pub fn integrand(&self, state_norm: T, history_norm: T, control_norm_sq: T) -> T {
        self.state_weight * state_norm * state_norm
            + self.history_weight * history_norm * history_norm
            + self.control_weight * control_norm_sq
    }

    /// `M2 + d ||x|| + e ||x_t||_r + f ||u||^2`.
    pub fn lower_bound(&self, state_norm: T, history_norm: T, control_norm_sq: T) -> T {
        self.m2 + self.d * state_norm + self.e * history_norm + self.f * control_norm_sq
    }

    /// Trapezoid rule for `\int_0^T L dt` along a solved pair. Segments use
    /// the right limit at their start and the left limit at their end, and
    /// `||x_t||_r` is the sup over the trailing window samples.
    pub fn integrate(&self, x: &Trajectory<T>, u: &ControlSignal<T>) -> Result<T> {
        let grid = x.grid();
        if grid != u.grid() {
            return Err(Error::Domain("control and trajectory grids differ".into()));
        }
        let o = grid.origin();
        let n = grid.forward_steps();
        let history_norm = |g: usize, from_right: bool| {
            if self.history_weight == T::zero() {
                T::zero()
            } else {
                x.history_segment(g, from_right).sup_norm()
            }
        };
        let node = |i: usize, from_right: bool| {
            let g = o + i;
            let state = if from_right { &x.right()[g] } else { &x.left()[g] };
            self.integrand(state.norm(), history_norm(g, from_right), u.samples()[i].norm_squared())
        };
        let half = grid.step() * lit(0.5);
        let mut total = T::zero();
        for i in 0..n {
            total = total + half * (node(i, true) + node(i + 1, false));
        }
        Ok(total)
    }
}

impl<T: Real> Default for CostDescriptor<T> {
    fn default() -> Self {
        Self::quadratic()
    }
}

fn one() -> f64 {
    1.0
}

/// JSON cost file.
///
/// ```json
/// {"state_weight": 1, "history_weight": 1, "control_weight": 1,
///  "d": 0, "e": 0, "f": 1, "M2": 0}
/// ```
///
/// Every key is optional; the defaults give the unit quadratic cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostFile {
    #[serde(default = "one")]
    pub state_weight: f64,
    #[serde(default = "one")]
    pub history_weight: f64,
    #[serde(default = "one")]
    pub control_weight: f64,
    #[serde(default)]
    pub d: f64,
    #[serde(default)]
    pub e: f64,
    #[serde(default = "one")]
    pub f: f64,
    #[serde(default, rename = "M2")]
    pub m2: f64,
}

impl Default for CostFile {
    fn default() -> Self {
        Self {
            state_weight: 1.0,
            history_weight: 1.0,
            control_weight: 1.0,
            d: 0.0,
            e: 0.0,
            f: 1.0,
            m2: 0.0,
        }
    }
}

impl CostFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("cost file: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&crate::spectral_model::read_text(path.as_ref())?)
    }

    pub fn to_descriptor<T: Real>(&self) -> Result<CostDescriptor<T>> {
        CostDescriptor::with_coercivity(
            lit(self.state_weight),
            lit(self.history_weight),
            lit(self.control_weight),
            lit(self.d),
            lit(self.e),
            lit(self.f),
            lit(self.m2),
        )
    }
}

/// Cost evaluation sharing one solver across many controls.
#[derive(Debug, Clone)]
pub struct CostEvaluator<'a, T> {
    solver: MildSolver<'a, T>,
    cost: CostDescriptor<T>,
    tol: T,
    max_iter: usize,
}

impl<'a, T: Real> CostEvaluator<'a, T> {
    pub fn new(spec: &'a ProblemSpec<T>, cost: CostDescriptor<T>, dt: T, tol: T, max_iter: usize) -> Result<Self> {
        Ok(Self::with_solver(MildSolver::new(spec, dt)?, cost, tol, max_iter))
    }

    pub fn with_solver(solver: MildSolver<'a, T>, cost: CostDescriptor<T>, tol: T, max_iter: usize) -> Self {
        Self {
            solver,
            cost,
            tol,
            max_iter,
        }
    }

    pub fn solver(&self) -> &MildSolver<'a, T> {
        &self.solver
    }

    pub fn cost(&self) -> &CostDescriptor<T> {
        &self.cost
    }

    pub fn dim(&self) -> usize {
        self.solver.spec().modes()
    }

    /// Solves for `u` and integrates the running cost.
    pub fn eval(&self, u: &ControlSignal<T>) -> Result<T> {
        Ok(self.eval_with_trajectory(u)?.0)
    }

    pub fn eval_with_trajectory(&self, u: &ControlSignal<T>) -> Result<(T, Trajectory<T>)> {
        if u.grid() != self.solver.grid() {
            return Err(Error::Domain("control is on a different grid".into()));
        }
        let x = self.solver.solve(u, self.tol, self.max_iter)?.trajectory;
        Ok((self.cost.integrate(&x, u)?, x))
    }
}

/// `J(u)` for a control on a solver-compatible grid.
pub fn eval_cost<T: Real>(
    spec: &ProblemSpec<T>,
    cost: &CostDescriptor<T>,
    u: &ControlSignal<T>,
    tol: T,
) -> Result<T> {
    let solver = MildSolver::with_grid(spec, *u.grid())?;
    CostEvaluator::with_solver(solver, *cost, tol, DEFAULT_MAX_ITER).eval(u)
}

pub(crate) const DEFAULT_MAX_ITER: usize = 200;

