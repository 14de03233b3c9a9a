use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::ml_special::mittag_leffler;
use crate::scalar::{lit, Real};

use super::{HistorySegment, Nonlinearity, SineBasis, SpectralVector};

/// Jump map `I_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "scale")]
pub enum ImpulseMap<T> {
    Zero,
    /// `I(x) = scale * x`; a reset `I(x) = -x` is `Linear(-1)`.
    Linear(T),
}

impl<T: Real> ImpulseMap<T> {
    pub fn apply(&self, x: &SpectralVector<T>) -> SpectralVector<T> {
        match *self {
            ImpulseMap::Zero => SpectralVector::zeros(x.dim()),
            ImpulseMap::Linear(s) => x.scaled(s),
        }
    }

    pub fn lipschitz(&self) -> T {
        match *self {
            ImpulseMap::Zero => T::zero(),
            ImpulseMap::Linear(s) => s.abs(),
        }
    }

    /// Global bound `sup ||I(x)||`, `None` when unbounded.
    pub fn bound(&self) -> Option<T> {
        match *self {
            ImpulseMap::Linear(s) if s != T::zero() => None,
            _ => Some(T::zero()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Impulse<T> {
    pub time: T,
    pub map: ImpulseMap<T>,
}

/// Term `c x(tau + s)` of the nonlocal condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonlocalTerm<T> {
    pub weight: T,
    pub anchor: T,
}

/// History datum `phi(s)` on `[-r, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub enum HistoryFunction<T> {
    Zero,
    Constant(SpectralVector<T>),
    /// `offset + s * slope`
    Affine {
        offset: SpectralVector<T>,
        slope: SpectralVector<T>,
    },
}

impl<T: Real> HistoryFunction<T> {
    pub fn eval(&self, s: T, dim: usize) -> SpectralVector<T> {
        match self {
            HistoryFunction::Zero => SpectralVector::zeros(dim),
            HistoryFunction::Constant(v) => v.clone(),
            HistoryFunction::Affine { offset, slope } => {
                let mut v = offset.clone();
                v.axpy(s, slope);
                v
            }
        }
    }

    fn dims(&self) -> Vec<usize> {
        match self {
            HistoryFunction::Zero => vec![],
            HistoryFunction::Constant(v) => vec![v.dim()],
            HistoryFunction::Affine { offset, slope } => vec![offset.dim(), slope.dim()],
        }
    }
}

/// Constants entering the well-posedness and contraction hypotheses.
/// `None` marks a constant that is unknown (custom nonlinearity without
/// declarations) or infinite (unbounded linear maps).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsLedger<T> {
    /// `M`: bound of the solution operator on `[0, T]`.
    pub solution_bound: T,
    /// `M_B = ||B||`.
    pub input_norm: T,
    /// `l_1`: bound of the impulse maps.
    pub impulse_bound: Option<T>,
    /// `l_2`: Lipschitz constant of the impulse maps.
    pub impulse_lipschitz: T,
    /// `l_g = sum |c_i|`.
    pub nonlocal_lipschitz: T,
    /// `K`: number of impulses.
    pub impulse_count: usize,
    /// `||L1||` in `L^{1/p}(0, T)`.
    pub norm_l1: Option<T>,
    /// `||L2||` in `L^{1/p}(0, T)`.
    pub norm_l2: Option<T>,
    /// `||M1||` in `L^{1/p}(0, T)`.
    pub norm_m1: Option<T>,
}

impl<T: Real> ConstantsLedger<T> {
    pub fn zero() -> Self {
        Self {
            solution_bound: T::zero(),
            input_norm: T::zero(),
            impulse_bound: Some(T::zero()),
            impulse_lipschitz: T::zero(),
            nonlocal_lipschitz: T::zero(),
            impulse_count: 0,
            norm_l1: Some(T::zero()),
            norm_l2: Some(T::zero()),
            norm_m1: Some(T::zero()),
        }
    }
}

/// Mutable description of a problem; validated by [`ProblemSpec::new`].
#[derive(Debug, Clone)]
pub struct ProblemParams<T> {
    pub alpha: T,
    pub omega: T,
    pub modes: usize,
    pub horizon: T,
    pub delay: T,
    pub impulses: Vec<Impulse<T>>,
    pub nonlocal: Vec<NonlocalTerm<T>>,
    pub phi: HistoryFunction<T>,
    pub nonlinearity: Nonlinearity<T>,
    pub input: DenseMatrix<T>,
}

impl<T: Real> ProblemParams<T> {
    /// Linear, undelayed, unforced problem with `B = I` and zero history.
    pub fn new(alpha: T, omega: T, modes: usize, horizon: T) -> Self {
        Self {
            alpha,
            omega,
            modes,
            horizon,
            delay: T::zero(),
            impulses: Vec::new(),
            nonlocal: Vec::new(),
            phi: HistoryFunction::Zero,
            nonlinearity: Nonlinearity::zero(),
            input: DenseMatrix::identity(modes),
        }
    }
}

/// Samples used to bound the solution operator on `[0, |lambda_N| T^alpha]`.
const BOUND_SAMPLES: usize = 200;

/// Validated, immutable problem description in `N` sine modes.
#[derive(Debug, Clone)]
pub struct ProblemSpec<T> {
    params: ProblemParams<T>,
    eigenvalues: Vec<T>,
    holder_p: T,
    basis: SineBasis<T>,
    constants: ConstantsLedger<T>,
}

impl<T: Real> ProblemSpec<T> {
    pub fn new(params: ProblemParams<T>) -> Result<Self> {
        let p = &params;
        let cfg = |msg: String| Err(Error::Config(msg));
        if !(p.alpha > T::one() && p.alpha < lit(2.0)) {
            return cfg(format!("alpha = {} must lie in (1, 2)", p.alpha));
        }
        if !(p.omega >= T::zero()) || !p.omega.is_finite() {
            return cfg(format!("omega = {} must be a finite non-negative shift", p.omega));
        }
        if p.modes == 0 {
            return cfg("mode count N must be at least 1".into());
        }
        if !(p.horizon > T::zero()) || !p.horizon.is_finite() {
            return cfg(format!("horizon T = {} must be positive", p.horizon));
        }
        if !(p.delay >= T::zero()) || !p.delay.is_finite() {
            return cfg(format!("delay r = {} must be non-negative", p.delay));
        }
        let mut last = T::zero();
        for imp in &p.impulses {
            if !(imp.time > last && imp.time < p.horizon) {
                return cfg(format!(
                    "impulse time {} must be strictly increasing inside (0, {})",
                    imp.time, p.horizon
                ));
            }
            last = imp.time;
        }
        for term in &p.nonlocal {
            if !(term.anchor >= T::zero() && term.anchor <= p.horizon) || !term.weight.is_finite() {
                return cfg(format!(
                    "nonlocal anchor {} must lie in [0, {}] with a finite weight",
                    term.anchor, p.horizon
                ));
            }
        }
        if p.phi.dims().iter().any(|&d| d != p.modes) {
            return cfg(format!("history function must have {} modes", p.modes));
        }
        if p.input.dim() != p.modes {
            return cfg(format!("input map must be {0}x{0}", p.modes));
        }
        let holder_p = p
            .nonlinearity
            .holder_p()
            .unwrap_or_else(|| (p.alpha - T::one()) * lit(0.5));
        if !(holder_p > T::zero() && holder_p < p.alpha - T::one()) {
            return cfg(format!(
                "exponent p = {holder_p} must lie in (0, alpha - 1) = (0, {})",
                p.alpha - T::one()
            ));
        }

        let eigenvalues: Vec<T> = (1..=p.modes)
            .map(|n| -(T::from_count(n * n)) - p.omega)
            .collect();
        let constants = Self::compute_constants(p, &eigenvalues, holder_p)?;
        Ok(Self {
            basis: SineBasis::new(p.modes),
            params,
            eigenvalues,
            holder_p,
            constants,
        })
    }

    fn compute_constants(
        p: &ProblemParams<T>,
        eigenvalues: &[T],
        holder_p: T,
    ) -> Result<ConstantsLedger<T>> {
        let reach = -*eigenvalues.last().expect("at least one mode") * p.horizon.powf(p.alpha);
        let mut solution_bound = T::zero();
        for j in 0..=BOUND_SAMPLES {
            let x = reach * T::from_count(j) / T::from_count(BOUND_SAMPLES);
            solution_bound = solution_bound.max(mittag_leffler(p.alpha, T::one(), -x)?.abs());
        }
        let impulse_bound = p
            .impulses
            .iter()
            .try_fold(T::zero(), |acc, imp| imp.map.bound().map(|b| acc.max(b)));
        let impulse_lipschitz = p
            .impulses
            .iter()
            .fold(T::zero(), |acc, imp| acc.max(imp.map.lipschitz()));
        let nonlocal_lipschitz = p.nonlocal.iter().map(|c| c.weight.abs()).sum();
        let (l1, l2, m1) = p.nonlinearity.constants(p.delay);
        // a constant function c has L^{1/p}(0, T) norm c T^p
        let scale = p.horizon.powf(holder_p);
        Ok(ConstantsLedger {
            solution_bound,
            input_norm: p.input.spectral_norm(),
            impulse_bound,
            impulse_lipschitz,
            nonlocal_lipschitz,
            impulse_count: p.impulses.len(),
            norm_l1: l1.map(|c| c * scale),
            norm_l2: l2.map(|c| c * scale),
            norm_m1: m1.map(|c| c * scale),
        })
    }

    pub fn params(&self) -> &ProblemParams<T> {
        &self.params
    }

    pub fn alpha(&self) -> T {
        self.params.alpha
    }

    pub fn omega(&self) -> T {
        self.params.omega
    }

    pub fn modes(&self) -> usize {
        self.params.modes
    }

    pub fn horizon(&self) -> T {
        self.params.horizon
    }

    pub fn delay(&self) -> T {
        self.params.delay
    }

    pub fn impulses(&self) -> &[Impulse<T>] {
        &self.params.impulses
    }

    pub fn nonlocal(&self) -> &[NonlocalTerm<T>] {
        &self.params.nonlocal
    }

    pub fn phi(&self) -> &HistoryFunction<T> {
        &self.params.phi
    }

    pub fn nonlinearity(&self) -> &Nonlinearity<T> {
        &self.params.nonlinearity
    }

    pub fn input(&self) -> &DenseMatrix<T> {
        &self.params.input
    }

    /// `lambda_n = -n^2 - omega`.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn holder_p(&self) -> T {
        self.holder_p
    }

    pub fn basis(&self) -> &SineBasis<T> {
        &self.basis
    }

    pub fn constants(&self) -> &ConstantsLedger<T> {
        &self.constants
    }

    /// Linear dynamics: affine `f`, linear impulses and nonlocal map.
    pub fn is_linear(&self) -> bool {
        self.params.nonlinearity.is_affine()
    }

    pub fn phi_at(&self, s: T) -> SpectralVector<T> {
        self.params.phi.eval(s, self.params.modes)
    }

    /// `f(t, x, x_t)`; `hist` must span a window of length `r` ending at `t`.
    pub fn eval_f(
        &self,
        t: T,
        x: &SpectralVector<T>,
        hist: &HistorySegment<T>,
    ) -> Result<SpectralVector<T>> {
        if !(t >= T::zero() && t <= self.horizon()) {
            return Err(Error::Domain(format!("t = {t} outside [0, {}]", self.horizon())));
        }
        let tol = lit::<T>(1e-9) * self.delay().max(T::one());
        if (hist.window() - self.delay()).abs() > tol {
            return Err(Error::Domain(format!(
                "history window {} does not match the delay {}",
                hist.window(),
                self.delay()
            )));
        }
        if x.dim() != self.modes() || hist.dim() != self.modes() {
            return Err(Error::Domain(format!("state must have {} modes", self.modes())));
        }
        self.params.nonlinearity.eval(&self.basis, t, x, hist)
    }

    /// Jump `I_k(x(t_k^-))` of the (0-based) impulse `k`.
    pub fn eval_impulse(&self, k: usize, x_left: &SpectralVector<T>) -> Result<SpectralVector<T>> {
        let imp = self.params.impulses.get(k).ok_or_else(|| {
            Error::Domain(format!(
                "impulse index {k} out of range ({} impulses)",
                self.params.impulses.len()
            ))
        })?;
        Ok(imp.map.apply(x_left))
    }

    /// `B u`.
    pub fn apply_input(&self, u: &SpectralVector<T>) -> SpectralVector<T> {
        SpectralVector::new(self.params.input.mul_vec(u.coeffs()))
    }

    /// `B^T v`.
    pub fn apply_input_adjoint(&self, v: &SpectralVector<T>) -> SpectralVector<T> {
        SpectralVector::new(self.params.input.transpose_mul_vec(v.coeffs()))
    }
}
