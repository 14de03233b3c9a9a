use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mild_solver::ControlSignal;
use crate::scalar::{lit, Real};
use crate::spectral_model::ProblemSpec;

use super::cost::{CostDescriptor, CostEvaluator};
use super::parameterization::ControlParameterization;

/// Settings of the projected-gradient descent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions<T> {
    /// Time step of the grid.
    pub dt: T,
    /// Picard tolerance of each state solve.
    pub solve_tol: T,
    pub max_inner: usize,
    /// First trial step of the line search.
    pub step: T,
    /// Budget of cost evaluations.
    pub max_evals: usize,
    /// Relative central difference step.
    pub fd_step: T,
    /// Stop when `||theta - P(theta - grad)||_inf` falls below this.
    pub stationarity_tol: T,
    /// Sufficient decrease constant of the Armijo test.
    pub armijo: T,
    pub max_backtracks: usize,
}

impl<T: Real> Default for MinimizeOptions<T> {
    fn default() -> Self {
        Self {
            dt: lit(0.01),
            solve_tol: lit(1e-12),
            max_inner: 200,
            step: T::one(),
            max_evals: 20_000,
            fd_step: lit(1e-5),
            stationarity_tol: lit(1e-6),
            armijo: lit(1e-4),
            max_backtracks: 40,
        }
    }
}

/// Why the descent stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Stationary,
    BudgetExhausted,
    LineSearchStalled,
}

#[derive(Debug, Clone)]
pub struct MinimizeOutcome<T> {
    /// Best coefficients found.
    pub params: Vec<T>,
    pub control: ControlSignal<T>,
    pub j_opt: T,
    /// Cost after every accepted step, starting from the initial point.
    pub history: Vec<T>,
    /// Projected gradient size at the returned point.
    pub stationarity: T,
    pub iterations: usize,
    pub evaluations: usize,
    pub stop: StopReason,
}

impl<T> MinimizeOutcome<T> {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::Stationary
    }
}

/// Cost as a function of the coefficients.
#[derive(Debug, Clone)]
pub struct ParameterizedCost<'a, T> {
    evaluator: CostEvaluator<'a, T>,
    param: ControlParameterization<T>,
}

impl<'a, T: Real> ParameterizedCost<'a, T> {
    pub fn new(evaluator: CostEvaluator<'a, T>, param: ControlParameterization<T>) -> Result<Self> {
        if param.dim() != evaluator.dim() {
            return Err(Error::Config(format!(
                "parameterization has {} modes, problem has {}",
                param.dim(),
                evaluator.dim()
            )));
        }
        Ok(Self { evaluator, param })
    }

    pub fn parameterization(&self) -> &ControlParameterization<T> {
        &self.param
    }

    pub fn evaluator(&self) -> &CostEvaluator<'a, T> {
        &self.evaluator
    }

    pub fn control(&self, params: &[T]) -> Result<ControlSignal<T>> {
        self.param.expand(*self.evaluator.solver().grid(), params)
    }

    pub fn eval(&self, params: &[T]) -> Result<T> {
        self.evaluator.eval(&self.control(params)?)
    }

    /// Central differences with step `rel * max(1, |theta_k|)`, one
    /// coefficient per task.
    pub fn gradient(&self, params: &[T], rel: T) -> Result<Vec<T>> {
        (0..params.len())
            .into_par_iter()
            .map(|k| {
                let h = rel * T::one().max(params[k].abs());
                let mut plus = params.to_vec();
                plus[k] = params[k] + h;
                let mut minus = params.to_vec();
                minus[k] = params[k] - h;
                Ok((self.eval(&plus)? - self.eval(&minus)?) / (h + h))
            })
            .collect()
    }

    /// `||theta - P(theta - g)||_inf`.
    pub fn stationarity(&self, params: &[T], gradient: &[T]) -> T {
        let trial: Vec<T> = params.iter().zip(gradient).map(|(&p, &g)| p - g).collect();
        self.param
            .project(&trial)
            .iter()
            .zip(params)
            .fold(T::zero(), |m, (&q, &p)| m.max((q - p).abs()))
    }
}

/// Projected-gradient descent from `start` (projected onto the box first).
pub fn minimize_from<T: Real>(
    problem: &ParameterizedCost<'_, T>,
    start: &[T],
    opts: &MinimizeOptions<T>,
) -> Result<MinimizeOutcome<T>> {
    let param = problem.parameterization();
    if start.len() != param.len() {
        return Err(Error::Domain(format!("expected {} coefficients", param.len())));
    }
    if !(opts.step > T::zero() && opts.fd_step > T::zero() && opts.armijo > T::zero()) {
        return Err(Error::Parameter("step, FD step and Armijo constant must be positive".into()));
    }
    let dim = param.len();
    let mut theta = param.project(start);
    let mut j = problem.eval(&theta)?;
    let mut evaluations = 1;
    let mut history = vec![j];
    let mut step = opts.step;
    let mut iterations = 0;
    let mut stationarity = T::infinity();

    let stop = loop {
        if evaluations + 2 * dim > opts.max_evals {
            break StopReason::BudgetExhausted;
        }
        let grad = problem.gradient(&theta, opts.fd_step)?;
        evaluations += 2 * dim;
        stationarity = problem.stationarity(&theta, &grad);
        if stationarity <= opts.stationarity_tol {
            break StopReason::Stationary;
        }

        let mut accepted = None;
        let mut budget_hit = false;
        for _ in 0..opts.max_backtracks {
            if evaluations >= opts.max_evals {
                budget_hit = true;
                break;
            }
            let trial: Vec<T> = theta.iter().zip(&grad).map(|(&p, &g)| p - step * g).collect();
            let trial = param.project(&trial);
            let decrease: T = theta.iter().zip(&trial).zip(&grad).map(|((&p, &q), &g)| g * (p - q)).sum();
            if decrease <= T::zero() {
                break;
            }
            let j_trial = problem.eval(&trial)?;
            evaluations += 1;
            if j_trial <= j - opts.armijo * decrease {
                accepted = Some((trial, j_trial));
                break;
            }
            step = step * lit(0.5);
        }
        match accepted {
            Some((trial, j_trial)) => {
                theta = trial;
                j = j_trial;
                history.push(j);
                iterations += 1;
                step = step + step;
            }
            None if budget_hit => break StopReason::BudgetExhausted,
            None => break StopReason::LineSearchStalled,
        }
    };

    Ok(MinimizeOutcome {
        control: problem.control(&theta)?,
        params: theta,
        j_opt: j,
        history,
        stationarity,
        iterations,
        evaluations,
        stop,
    })
}

/// Minimizes `J` over the parameterization, starting from zero control
/// projected onto the box.
pub fn minimize<T: Real>(
    spec: &ProblemSpec<T>,
    cost: &CostDescriptor<T>,
    param: &ControlParameterization<T>,
    opts: &MinimizeOptions<T>,
) -> Result<MinimizeOutcome<T>> {
    let evaluator = CostEvaluator::new(spec, *cost, opts.dt, opts.solve_tol, opts.max_inner)?;
    let problem = ParameterizedCost::new(evaluator, param.clone())?;
    minimize_from(&problem, &vec![T::zero(); param.len()], opts)
}
