use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mild_solver::{ControlSignal, MildSolver, Trajectory};
use crate::scalar::{lit, Real};
use crate::spectral_model::{ProblemSpec, SpectralVector};

use super::grammian::{control_from_residual, residual_p_with, Grammian};

/// Settings of the coupled control / state iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteerOptions<T> {
    /// Time step of the grid.
    pub dt: T,
    /// Outer tolerance on the sup-norm change of the control.
    pub tol: T,
    /// Picard tolerance of each state solve.
    pub inner_tol: T,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Relaxation `theta` in `u <- (1 - theta) u + theta u_new`, in `[0.1, 1]`.
    pub damping: T,
}

impl<T: Real> Default for SteerOptions<T> {
    fn default() -> Self {
        Self {
            dt: lit(1.0 / 200.0),
            tol: lit(1e-8),
            inner_tol: lit(1e-10),
            max_outer: 200,
            max_inner: 200,
            damping: T::one(),
        }
    }
}

impl<T: Real> SteerOptions<T> {
    fn validate(&self) -> Result<()> {
        if !(self.tol > T::zero() && self.inner_tol > T::zero()) {
            return Err(Error::Parameter("tolerances must be positive".into()));
        }
        if !(self.damping >= lit(0.1) && self.damping <= T::one()) {
            return Err(Error::Parameter(format!(
                "damping {} must lie in [0.1, 1]",
                self.damping
            )));
        }
        Ok(())
    }
}

/// Record of one steering run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteeringReport {
    pub eps: f64,
    /// `||x(T) - h||`.
    pub terminal_error: f64,
    /// `\int_0^T ||u||^2 dt`.
    pub control_energy: f64,
    pub outer_iters: usize,
    /// Picard residual curve of the state solve in each outer iteration.
    pub inner_residuals: Vec<Vec<f64>>,
    /// Sup-norm control change per outer iteration.
    pub control_updates: Vec<f64>,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Converged steering run.
#[derive(Debug, Clone)]
pub struct SteerOutcome<T> {
    pub report: SteeringReport,
    pub trajectory: Trajectory<T>,
    pub control: ControlSignal<T>,
}

/// Failed steering run with the last iterate, when there is one.
#[derive(Debug, Clone)]
pub struct SteerError<T> {
    pub report: SteeringReport,
    pub trajectory: Option<Trajectory<T>>,
    pub control: Option<ControlSignal<T>>,
    pub reason: String,
    /// The inner solve failed rather than the outer iteration.
    pub inner_failure: bool,
}

impl<T> fmt::Display for SteerError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "steering at eps = {} stopped after {} outer iterations: {}",
            self.report.eps, self.report.outer_iters, self.reason
        )
    }
}

impl<T: fmt::Debug> std::error::Error for SteerError<T> {}

impl<T> From<SteerError<T>> for Error {
    fn from(e: SteerError<T>) -> Self {
        Error::NonConvergence {
            residuals: e.report.control_updates.clone(),
        }
    }
}

/// Shared solver and Grammian for steering one problem at several `eps`.
#[derive(Debug, Clone)]
pub struct Steering<'a, T> {
    solver: MildSolver<'a, T>,
    grammian: Grammian<T>,
    options: SteerOptions<T>,
}

impl<'a, T: Real> Steering<'a, T> {
    pub fn new(spec: &'a ProblemSpec<T>, options: SteerOptions<T>) -> Result<Self> {
        options.validate()?;
        let solver = MildSolver::new(spec, options.dt)?;
        let grammian = Grammian::for_solver(&solver)?;
        Ok(Self {
            solver,
            grammian,
            options,
        })
    }

    pub fn solver(&self) -> &MildSolver<'a, T> {
        &self.solver
    }

    pub fn grammian(&self) -> &Grammian<T> {
        &self.grammian
    }

    /// Alternates control synthesis and state solves until the control
    /// settles. The reported pair `(x, u)` satisfies `x = solve(u)`.
    #[allow(clippy::result_large_err)]
    pub fn steer(&self, h: &SpectralVector<T>, eps: T) -> Result<SteerOutcome<T>, SteerError<T>> {
        let opts = &self.options;
        let spec = self.solver.spec();
        let grid = *self.solver.grid();
        let mut report = SteeringReport {
            eps: eps.as_f64(),
            terminal_error: f64::NAN,
            control_energy: 0.0,
            outer_iters: 0,
            inner_residuals: Vec::new(),
            control_updates: Vec::new(),
            converged: false,
            warning: None,
        };
        let mut control = ControlSignal::zeros(grid, spec.modes());
        let setup_failure = |report: SteeringReport, reason: String| SteerError {
            report,
            trajectory: None,
            control: None,
            reason,
            inner_failure: false,
        };
        if h.dim() != spec.modes() {
            let reason = format!("target must have {} modes", spec.modes());
            return Err(setup_failure(report, reason));
        }
        let resolvent = match self.grammian.resolvent(eps) {
            Ok(r) => r,
            Err(e) => return Err(setup_failure(report, e.to_string())),
        };
        let mut trajectory = match self.solver.solve(&control, opts.inner_tol, opts.max_inner) {
            Ok(out) => {
                report.warning = out.warning;
                report.inner_residuals.push(out.residuals.iter().map(|r| r.as_f64()).collect());
                out.trajectory
            }
            Err(e) => {
                return Err(SteerError {
                    report,
                    trajectory: None,
                    control: Some(control),
                    reason: e.to_string(),
                    inner_failure: true,
                })
            }
        };

        let finish = |mut report: SteeringReport, trajectory: &Trajectory<T>, control: &ControlSignal<T>| {
            report.terminal_error = trajectory.terminal().distance(h).as_f64();
            report.control_energy = control.energy().as_f64();
            report
        };

        for outer in 1..=opts.max_outer {
            report.outer_iters = outer;
            let step = residual_p_with(&self.solver, &trajectory, h)
                .and_then(|p| control_from_residual(&self.solver, &resolvent, &p));
            let synthesized = match step {
                Ok(u) => u,
                Err(e) => {
                    return Err(SteerError {
                        report: finish(report, &trajectory, &control),
                        trajectory: Some(trajectory),
                        control: Some(control),
                        reason: e.to_string(),
                        inner_failure: true,
                    })
                }
            };
            let next = if opts.damping == T::one() {
                synthesized
            } else {
                control.combine(T::one() - opts.damping, &synthesized, opts.damping)
            };
            let update = next.sup_distance(&control);
            report.control_updates.push(update.as_f64());
            control = next;
            match self.solver.solve_from(trajectory.clone(), &control, opts.inner_tol, opts.max_inner) {
                Ok(out) => {
                    report.inner_residuals.push(out.residuals.iter().map(|r| r.as_f64()).collect());
                    trajectory = out.trajectory;
                }
                Err(e) => {
                    return Err(SteerError {
                        report: finish(report, &trajectory, &control),
                        trajectory: Some(trajectory),
                        control: Some(control),
                        reason: e.to_string(),
                        inner_failure: true,
                    })
                }
            }
            if !update.is_finite() {
                break;
            }
            if update <= opts.tol {
                report.converged = true;
                return Ok(SteerOutcome {
                    report: finish(report, &trajectory, &control),
                    trajectory,
                    control,
                });
            }
        }
        let last = report.control_updates.last().copied().unwrap_or(f64::NAN);
        Err(SteerError {
            report: finish(report, &trajectory, &control),
            trajectory: Some(trajectory),
            control: Some(control),
            reason: format!("control change {last:e} still above {}", opts.tol),
            inner_failure: false,
        })
    }
}

/// Steers `spec` towards `h` with the regularized resolvent control.
#[allow(clippy::result_large_err)]
pub fn steer<T: Real>(
    spec: &ProblemSpec<T>,
    h: &SpectralVector<T>,
    eps: T,
    options: &SteerOptions<T>,
) -> Result<SteerOutcome<T>, SteerError<T>> {
    let steering = Steering::new(spec, *options).map_err(|e| SteerError {
        report: SteeringReport {
            eps: eps.as_f64(),
            terminal_error: f64::NAN,
            control_energy: f64::NAN,
            outer_iters: 0,
            inner_residuals: Vec::new(),
            control_updates: Vec::new(),
            converged: false,
            warning: None,
        },
        trajectory: None,
        control: None,
        reason: e.to_string(),
        inner_failure: false,
    })?;
    steering.steer(h, eps)
}

/// One row of an epsilon sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub eps: f64,
    #[serde(flatten)]
    pub outcome: SweepOutcome,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOutcome {
    Converged(SteeringReport),
    Failed { report: SteeringReport, reason: String },
}

impl SweepEntry {
    /// The report, whether or not the run converged.
    pub fn report(&self) -> &SteeringReport {
        match &self.outcome {
            SweepOutcome::Converged(r) => r,
            SweepOutcome::Failed { report, .. } => report,
        }
    }

    pub fn converged(&self) -> bool {
        matches!(self.outcome, SweepOutcome::Converged(_))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub entries: Vec<SweepEntry>,
    /// Terminal errors of the converged entries never increase along the list.
    pub non_increasing: bool,
}

/// Steers for every `eps` in a strictly decreasing list. Entries run in
/// parallel and come back in list order; a failed entry does not stop the
/// sweep.
pub fn epsilon_sweep<T: Real>(
    spec: &ProblemSpec<T>,
    h: &SpectralVector<T>,
    eps_list: &[T],
    options: &SteerOptions<T>,
) -> Result<SweepResult> {
    if eps_list.is_empty() {
        return Err(Error::Parameter("eps list is empty".into()));
    }
    if eps_list.iter().any(|&e| !(e > T::zero())) || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Parameter(
            "eps list must be positive and strictly decreasing".into(),
        ));
    }
    let steering = Steering::new(spec, *options)?;
    let entries: Vec<SweepEntry> = eps_list
        .par_iter()
        .map(|&eps| {
            let outcome = match steering.steer(h, eps) {
                Ok(o) => SweepOutcome::Converged(o.report),
                Err(e) => SweepOutcome::Failed {
                    reason: e.reason.clone(),
                    report: e.report,
                },
            };
            SweepEntry {
                eps: eps.as_f64(),
                outcome,
            }
        })
        .collect();
    let errors: Vec<f64> = entries
        .iter()
        .filter(|e| e.converged())
        .map(|e| e.report().terminal_error)
        .collect();
    let non_increasing = errors.windows(2).all(|w| w[1] <= w[0]);
    Ok(SweepResult {
        entries,
        non_increasing,
    })
}
