use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::spectral_model::{ConstantsLedger, ProblemSpec, SpectralVector};

use super::{ControlSignal, KernelTable, TimeGrid, Trajectory};

/// Left and right values at every forward node.
pub type NodePairs<T> = (Vec<SpectralVector<T>>, Vec<SpectralVector<T>>);

/// Result of a converged Picard iteration.
#[derive(Debug, Clone)]
pub struct SolveOutcome<T> {
    pub trajectory: Trajectory<T>,
    /// `sup ||x^{m+1} - x^m||` per iteration.
    pub residuals: Vec<T>,
    /// Set when the contraction hypothesis fails or cannot be checked.
    pub warning: Option<String>,
}

/// Mild-solution integrator for one problem on one grid. Holds the kernel
/// table so repeated solves (different controls) reuse it.
#[derive(Debug, Clone)]
pub struct MildSolver<'a, T> {
    spec: &'a ProblemSpec<T>,
    grid: TimeGrid<T>,
    kernel: KernelTable<T>,
    impulse_nodes: Vec<usize>,
    anchor_nodes: Vec<usize>,
}

impl<'a, T: Real> MildSolver<'a, T> {
    pub fn new(spec: &'a ProblemSpec<T>, dt: T) -> Result<Self> {
        Self::with_grid(spec, TimeGrid::for_spec(spec, dt)?)
    }

    pub fn with_grid(spec: &'a ProblemSpec<T>, grid: TimeGrid<T>) -> Result<Self> {
        let tol = grid.step() * lit(1e-6);
        if (grid.horizon() - spec.horizon()).abs() > tol || (grid.delay() - spec.delay()).abs() > tol {
            return Err(Error::Domain(format!(
                "grid spans [-{}, {}], problem needs [-{}, {}]",
                grid.delay(),
                grid.horizon(),
                spec.delay(),
                spec.horizon()
            )));
        }
        let node = |t: T, what: &str| {
            grid.forward_index(t)
                .ok_or_else(|| Error::Config(format!("{what} {t} is not a grid node")))
        };
        let impulse_nodes = spec
            .impulses()
            .iter()
            .map(|imp| node(imp.time, "impulse time"))
            .collect::<Result<_>>()?;
        let anchor_nodes = spec
            .nonlocal()
            .iter()
            .map(|term| node(term.anchor, "nonlocal anchor"))
            .collect::<Result<_>>()?;
        let kernel = KernelTable::new(spec.alpha(), spec.eigenvalues(), grid.step(), grid.forward_steps())?;
        Ok(Self {
            spec,
            grid,
            kernel,
            impulse_nodes,
            anchor_nodes,
        })
    }

    pub fn spec(&self) -> &ProblemSpec<T> {
        self.spec
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn kernel(&self) -> &KernelTable<T> {
        &self.kernel
    }

    /// Forward node of each impulse.
    pub fn impulse_nodes(&self) -> &[usize] {
        &self.impulse_nodes
    }

    fn impulse_pairs(&self) -> Vec<(usize, usize)> {
        let m = self.grid.origin();
        self.impulse_nodes.iter().enumerate().map(|(k, &i)| (k, m + i)).collect()
    }

    /// `x^0`: the history function on `[-r, 0]`, held at `phi(0)` afterwards.
    pub fn initial_guess(&self) -> Trajectory<T> {
        let m = self.grid.origin();
        let phi0 = self.spec.phi_at(T::zero());
        let values: Vec<_> = (0..self.grid.len())
            .map(|g| {
                if g < m {
                    self.spec.phi_at(self.grid.time(g))
                } else {
                    phi0.clone()
                }
            })
            .collect();
        Trajectory::new(self.grid, values.clone(), values, &self.impulse_pairs()).expect("grid-sized")
    }

    /// `g(x)(s)` at history node `g` (global index `<= m`).
    pub fn nonlocal_at(&self, x: &Trajectory<T>, g: usize) -> SpectralVector<T> {
        let mut out = SpectralVector::zeros(self.spec.modes());
        for (term, &a) in self.spec.nonlocal().iter().zip(&self.anchor_nodes) {
            // tau + s sits at global node a + g
            out.axpy(term.weight, &x.left()[a + g]);
        }
        out
    }

    /// `phi(0) - g(x)(0)`.
    pub fn initial_value(&self, x: &Trajectory<T>) -> SpectralVector<T> {
        &self.spec.phi_at(T::zero()) - &self.nonlocal_at(x, self.grid.origin())
    }

    /// `f(t, x(t), x_t)` at every forward node, as (left, right) values.
    pub fn nonlinear_forcing(&self, x: &Trajectory<T>) -> Result<NodePairs<T>> {
        let spec = self.spec;
        let f = spec.nonlinearity();
        let n = self.grid.forward_steps();
        let m = self.grid.origin();
        let dim = spec.modes();
        if f.is_zero() {
            let zeros = vec![SpectralVector::zeros(dim); n + 1];
            return Ok((zeros.clone(), zeros));
        }
        let jump_at = |g: usize| x.left()[g] != x.right()[g];

        if f.custom_fn().is_some() {
            let mut left = Vec::with_capacity(n + 1);
            let mut right = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let g = m + i;
                let t = self.grid.forward_time(i);
                let l = spec.eval_f(t, &x.left()[g], &x.history_segment(g, false))?;
                let r = if jump_at(g) {
                    spec.eval_f(t, &x.right()[g], &x.history_segment(g, true))?
                } else {
                    l.clone()
                };
                left.push(l);
                right.push(r);
            }
            return Ok((left, right));
        }

        let basis = spec.basis();
        let mut left: Vec<_> = (0..=n).map(|i| f.instant(basis, &x.left()[m + i])).collect();
        let mut right: Vec<_> = (0..=n)
            .map(|i| {
                let g = m + i;
                if jump_at(g) {
                    f.instant(basis, &x.right()[g])
                } else {
                    left[i].clone()
                }
            })
            .collect();

        if m > 0 && f.memory_integrand(basis, &x.left()[0]).is_some() {
            let integrand_l: Vec<_> = x
                .left()
                .iter()
                .map(|v| f.memory_integrand(basis, v).expect("memory term"))
                .collect();
            let integrand_r: Vec<_> = (0..self.grid.len())
                .map(|g| {
                    if jump_at(g) {
                        f.memory_integrand(basis, &x.right()[g]).expect("memory term")
                    } else {
                        integrand_l[g].clone()
                    }
                })
                .collect();
            let h = self.grid.step();
            let half = h * lit(0.5);
            let rate = f.kernel_rate();
            let weights: Vec<T> = (0..=m)
                .map(|lag| (-rate * h * T::from_count(lag)).exp() * half)
                .collect();
            for i in 0..=n {
                let g = m + i;
                let mut mem = SpectralVector::zeros(dim);
                for a in (g - m)..g {
                    mem.axpy(weights[g - a], &integrand_r[a]);
                    mem.axpy(weights[g - a - 1], &integrand_l[a + 1]);
                }
                let mut mem_right = mem.clone();
                if jump_at(g) {
                    mem_right.axpy(weights[0], &integrand_r[g]);
                    mem_right.axpy(-weights[0], &integrand_l[g]);
                }
                left[i].axpy(T::one(), &mem);
                right[i].axpy(T::one(), &mem_right);
            }
        }
        for (i, v) in left.iter().chain(&right).enumerate() {
            if !v.is_finite() {
                return Err(Error::Nonlinearity {
                    t: self.grid.forward_time(i % (n + 1)).as_f64(),
                    reason: "non-finite value".into(),
                });
            }
        }
        Ok((left, right))
    }

    /// `\int_0^{t_i} S(t_i - s) B u(s) ds` at every forward node.
    pub fn control_response(&self, u: &ControlSignal<T>) -> Result<Vec<SpectralVector<T>>> {
        if u.grid() != &self.grid {
            return Err(Error::Domain("control is sampled on a different grid".into()));
        }
        if u.dim() != self.spec.modes() {
            return Err(Error::Domain(format!("control must have {} modes", self.spec.modes())));
        }
        let forcing: Vec<_> = u.samples().iter().map(|s| self.spec.apply_input(s)).collect();
        Ok(self.kernel.convolve_all(&forcing, &forcing))
    }

    /// Jumps `I_k(x(t_k^-))` evaluated on `x`.
    pub fn jumps(&self, x: &Trajectory<T>) -> Vec<SpectralVector<T>> {
        let m = self.grid.origin();
        self.impulse_nodes
            .iter()
            .enumerate()
            .map(|(k, &i)| self.spec.impulses()[k].map.apply(&x.left()[m + i]))
            .collect()
    }

    /// Everything but the control term at forward node `i`:
    /// `S(t_i) x(0) + sum_{t_k < t_i} S(t_i - t_k) I_k + \int_0^{t_i} S f`,
    /// with all data taken from `x`.
    pub fn uncontrolled_part_at(&self, x: &Trajectory<T>, i: usize) -> Result<SpectralVector<T>> {
        let (fl, fr) = self.nonlinear_forcing(x)?;
        let mut v = self.kernel.apply(i, &self.initial_value(x));
        for (jump, &ik) in self.jumps(x).iter().zip(&self.impulse_nodes) {
            if ik < i {
                v.axpy(T::one(), &self.kernel.apply(i - ik, jump));
            }
        }
        v.axpy(T::one(), &self.kernel.convolve_at(&fl, &fr, i));
        Ok(v)
    }

    /// One Picard sweep `x -> Phi(x)` given the precomputed control term.
    pub fn picard_step(&self, x: &Trajectory<T>, control: &[SpectralVector<T>]) -> Result<Trajectory<T>> {
        let m = self.grid.origin();
        let n = self.grid.forward_steps();
        let mut left = Vec::with_capacity(self.grid.len());
        for g in 0..m {
            left.push(&self.spec.phi_at(self.grid.time(g)) - &self.nonlocal_at(x, g));
        }
        let x0 = self.initial_value(x);
        let (fl, fr) = self.nonlinear_forcing(x)?;
        let conv_f = self.kernel.convolve_all(&fl, &fr);
        let jumps = self.jumps(x);
        for i in 0..=n {
            let mut v = self.kernel.apply(i, &x0);
            for (jump, &ik) in jumps.iter().zip(&self.impulse_nodes) {
                if ik < i {
                    v.axpy(T::one(), &self.kernel.apply(i - ik, jump));
                }
            }
            v.axpy(T::one(), &control[i]);
            v.axpy(T::one(), &conv_f[i]);
            left.push(v);
        }
        let mut right = left.clone();
        for (jump, &ik) in jumps.iter().zip(&self.impulse_nodes) {
            right[m + ik].axpy(T::one(), jump);
        }
        Trajectory::new(self.grid, left, right, &self.impulse_pairs())
    }

    /// Right values recomputed from the final left limits so that every
    /// jump equals `I_k(x(t_k^-))` exactly.
    fn finalize(&self, x: Trajectory<T>) -> Result<Trajectory<T>> {
        let m = self.grid.origin();
        let left = x.left().to_vec();
        let mut right = x.right().to_vec();
        for (k, &ik) in self.impulse_nodes.iter().enumerate() {
            let g = m + ik;
            right[g] = &left[g] + &self.spec.impulses()[k].map.apply(&left[g]);
        }
        Trajectory::new(self.grid, left, right, &self.impulse_pairs())
    }

    /// Picard iteration from `x^0` until the sup-norm update is at most `tol`.
    pub fn solve(&self, u: &ControlSignal<T>, tol: T, max_iter: usize) -> Result<SolveOutcome<T>> {
        self.solve_from(self.initial_guess(), u, tol, max_iter)
    }

    /// As [`Self::solve`], starting from a given iterate.
    pub fn solve_from(
        &self,
        start: Trajectory<T>,
        u: &ControlSignal<T>,
        tol: T,
        max_iter: usize,
    ) -> Result<SolveOutcome<T>> {
        if !(tol > T::zero()) {
            return Err(Error::Parameter(format!("tolerance {tol} must be positive")));
        }
        if start.grid() != &self.grid {
            return Err(Error::Domain("starting iterate is on a different grid".into()));
        }
        let control = self.control_response(u)?;
        let mut x = start;
        let mut residuals = Vec::new();
        for _ in 0..max_iter {
            let next = self.picard_step(&x, &control)?;
            let residual = next.sup_distance(&x);
            residuals.push(residual);
            x = next;
            if !residual.is_finite() {
                break;
            }
            if residual <= tol {
                return Ok(SolveOutcome {
                    trajectory: self.finalize(x)?,
                    residuals,
                    warning: contraction_warning(self.spec),
                });
            }
        }
        Err(Error::NonConvergence {
            residuals: residuals.iter().map(|r| r.as_f64()).collect(),
        })
    }
}

/// `M (K l_2 + l_g + T^{1-p} (||L1|| + ||L2||))`, the part of the
/// contraction factor that does not involve the control.
pub fn inner_factor<T: Real>(ledger: &ConstantsLedger<T>, horizon: T, p: T) -> Result<T> {
    let (l1, l2) = match (ledger.norm_l1, ledger.norm_l2) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::Config(
                "Lipschitz constants L1, L2 of the nonlinearity are not declared".into(),
            ))
        }
    };
    let k = T::from_count(ledger.impulse_count);
    Ok(ledger.solution_bound
        * (k * ledger.impulse_lipschitz + ledger.nonlocal_lipschitz + horizon.powf(T::one() - p) * (l1 + l2)))
}

/// The contraction factor
/// `M (K l_2 + l_g + T^{1-p} (||L1|| + ||L2||)) (1 + M M_B^2 T / eps)`.
pub fn contraction_factor<T: Real>(ledger: &ConstantsLedger<T>, horizon: T, p: T, eps: T) -> Result<T> {
    if !(eps > T::zero()) {
        return Err(Error::Parameter(format!("eps = {eps} must be positive")));
    }
    let inner = inner_factor(ledger, horizon, p)?;
    let m = ledger.solution_bound;
    let mb = ledger.input_norm;
    Ok(inner * (T::one() + m * mb * mb * horizon / eps))
}

/// Contraction factor of `spec` at regularization `eps`; compare against 1.
pub fn contraction_check<T: Real>(spec: &ProblemSpec<T>, eps: T) -> Result<T> {
    contraction_factor(spec.constants(), spec.horizon(), spec.holder_p(), eps)
}

fn contraction_warning<T: Real>(spec: &ProblemSpec<T>) -> Option<String> {
    match inner_factor(spec.constants(), spec.horizon(), spec.holder_p()) {
        Ok(v) if v >= T::one() => Some(format!(
            "contraction factor {v} >= 1; convergence is not guaranteed"
        )),
        Ok(_) => None,
        Err(e) => Some(format!("contraction factor unavailable: {e}")),
    }
}

/// Mild solution for control `u` on the grid `u` is sampled on.
pub fn solve_mild<T: Real>(
    spec: &ProblemSpec<T>,
    u: &ControlSignal<T>,
    tol: T,
    max_iter: usize,
) -> Result<Trajectory<T>> {
    MildSolver::with_grid(spec, *u.grid())?
        .solve(u, tol, max_iter)
        .map(|o| o.trajectory)
}

/// `\int_0^t S(t - s) w(s) ds` at the forward node `t`, for forcing sampled
/// on the forward nodes of `grid`.
pub fn convolve<T: Real>(
    spec: &ProblemSpec<T>,
    grid: &TimeGrid<T>,
    forcing: &[SpectralVector<T>],
    t: T,
) -> Result<SpectralVector<T>> {
    let i = grid
        .forward_index(t)
        .ok_or_else(|| Error::Domain(format!("t = {t} is not a forward grid node")))?;
    if forcing.len() <= i {
        return Err(Error::Domain(format!("forcing has {} samples, need {}", forcing.len(), i + 1)));
    }
    if forcing.iter().any(|w| w.dim() != spec.modes()) {
        return Err(Error::Domain(format!("forcing must have {} modes", spec.modes())));
    }
    let kernel = KernelTable::new(spec.alpha(), spec.eigenvalues(), grid.step(), i)?;
    Ok(kernel.convolve_at(forcing, forcing, i))
}
