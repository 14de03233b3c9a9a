use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigenvalues, Cholesky, DenseMatrix};
use crate::mild_solver::{ControlSignal, KernelTable, MildSolver, Trajectory};
use crate::quadrature::trapezoid_weight;
use crate::scalar::Real;
use crate::spectral_model::{ProblemSpec, SpectralVector};

/// Controllability Grammian `\int_0^T D(T-s) B B^T D(T-s) ds`, by the
/// trapezoid rule on the solver grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grammian<T> {
    matrix: DenseMatrix<T>,
}

impl<T: Real> Grammian<T> {
    /// From a kernel table with `steps` forward steps and input map `B`.
    pub fn from_kernel(kernel: &KernelTable<T>, input: &DenseMatrix<T>, steps: usize) -> Result<Self> {
        if kernel.max_lag() < steps {
            return Err(Error::Domain(format!(
                "kernel covers {} lags, Grammian needs {steps}",
                kernel.max_lag()
            )));
        }
        let dim = input.dim();
        let bbt = input.matmul(&input.transpose());
        let mut matrix = DenseMatrix::zeros(dim);
        for j in 0..=steps {
            let w = trapezoid_weight(j, steps, kernel.step());
            let d = kernel.at(steps - j);
            for a in 0..dim {
                let wa = w * d[a];
                for b in 0..=a {
                    matrix[(a, b)] = matrix[(a, b)] + wa * bbt[(a, b)] * d[b];
                }
            }
        }
        for a in 0..dim {
            for b in 0..a {
                matrix[(b, a)] = matrix[(a, b)];
            }
        }
        Ok(Self { matrix })
    }

    pub fn for_solver(solver: &MildSolver<'_, T>) -> Result<Self> {
        Self::from_kernel(solver.kernel(), solver.spec().input(), solver.grid().forward_steps())
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn quadrature(&self) -> &'static str {
        "composite trapezoid"
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<T> {
        symmetric_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[0]
    }

    /// Factorization of `eps I + Gamma`.
    pub fn resolvent(&self, eps: T) -> Result<Resolvent<T>> {
        if !(eps > T::zero()) {
            return Err(Error::Parameter(format!("eps = {eps} must be positive")));
        }
        Ok(Resolvent {
            eps,
            factor: Cholesky::factor(&self.matrix.shifted(eps))?,
        })
    }
}

/// `(eps I + Gamma)^{-1}` held as a Cholesky factor.
#[derive(Debug, Clone)]
pub struct Resolvent<T> {
    eps: T,
    factor: Cholesky<T>,
}

impl<T: Real> Resolvent<T> {
    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn apply(&self, v: &SpectralVector<T>) -> SpectralVector<T> {
        SpectralVector::new(self.factor.solve(v.coeffs()))
    }
}

/// Grammian of `spec` on a grid of step `dt`.
pub fn grammian<T: Real>(spec: &ProblemSpec<T>, dt: T) -> Result<Grammian<T>> {
    Grammian::for_solver(&MildSolver::new(spec, dt)?)
}

/// `p(x) = h - S(T)(phi(0) - g(x)(0)) - sum_k S(T - t_k) I_k(x(t_k^-)) - \int_0^T S(T-s) f ds`.
pub fn residual_p_with<T: Real>(
    solver: &MildSolver<'_, T>,
    x: &Trajectory<T>,
    h: &SpectralVector<T>,
) -> Result<SpectralVector<T>> {
    if x.grid() != solver.grid() {
        return Err(Error::Domain("trajectory is on a different grid".into()));
    }
    if h.dim() != solver.spec().modes() {
        return Err(Error::Domain(format!("target must have {} modes", solver.spec().modes())));
    }
    Ok(h - &solver.uncontrolled_part_at(x, solver.grid().forward_steps())?)
}

/// [`residual_p_with`] on the grid of `x`.
pub fn residual_p<T: Real>(
    spec: &ProblemSpec<T>,
    x: &Trajectory<T>,
    h: &SpectralVector<T>,
) -> Result<SpectralVector<T>> {
    residual_p_with(&MildSolver::with_grid(spec, *x.grid())?, x, h)
}

/// `u(t_j) = B^T D(T - t_j) (eps I + Gamma)^{-1} p`.
pub fn control_from_residual<T: Real>(
    solver: &MildSolver<'_, T>,
    resolvent: &Resolvent<T>,
    p: &SpectralVector<T>,
) -> Result<ControlSignal<T>> {
    let q = resolvent.apply(p);
    let n = solver.grid().forward_steps();
    let samples = (0..=n)
        .map(|j| solver.spec().apply_input_adjoint(&solver.kernel().apply(n - j, &q)))
        .collect();
    ControlSignal::new(*solver.grid(), samples)
}

/// Steering control for the current trajectory `x`.
pub fn synthesize_control<T: Real>(
    spec: &ProblemSpec<T>,
    x: &Trajectory<T>,
    h: &SpectralVector<T>,
    eps: T,
) -> Result<ControlSignal<T>> {
    let solver = MildSolver::with_grid(spec, *x.grid())?;
    let resolvent = Grammian::for_solver(&solver)?.resolvent(eps)?;
    let p = residual_p_with(&solver, x, h)?;
    control_from_residual(&solver, &resolvent, &p)
}
