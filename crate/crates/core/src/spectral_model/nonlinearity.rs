use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{HistorySegment, SineBasis, SpectralVector};

/// Pointwise scalar map applied to the physical-space state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointwiseMap {
    None,
    Linear,
    Sin,
}

impl PointwiseMap {
    fn is_affine(self) -> bool {
        !matches!(self, PointwiseMap::Sin)
    }

    /// `coef * map(x)` in spectral coordinates.
    fn apply<T: Real>(self, basis: &SineBasis<T>, coef: T, x: &SpectralVector<T>) -> SpectralVector<T> {
        match self {
            PointwiseMap::None => SpectralVector::zeros(x.dim()),
            // the projection of a linear map is the map itself
            PointwiseMap::Linear => x.scaled(coef),
            PointwiseMap::Sin => basis.map_pointwise(x, |v| coef * v.sin()),
        }
    }
}

/// User-supplied `f(t, x, x_t)`.
pub type CustomFn<T> = Arc<
    dyn Fn(T, &SpectralVector<T>, &HistorySegment<T>) -> std::result::Result<SpectralVector<T>, String>
        + Send
        + Sync,
>;

#[derive(Clone)]
pub enum NonlinearityKind<T> {
    Zero,
    /// `a f1(x(t)) + b \int_{t-r}^t e^{-kappa (t-s)} f2(x(s)) ds`, with `f1`
    /// and `f2` applied pointwise in `y`.
    Relaxation {
        f1: PointwiseMap,
        a: T,
        f2: PointwiseMap,
        b: T,
        kernel_rate: T,
    },
    Custom(CustomFn<T>),
}

impl<T: fmt::Debug> fmt::Debug for NonlinearityKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonlinearityKind::Zero => f.write_str("Zero"),
            NonlinearityKind::Relaxation {
                f1,
                a,
                f2,
                b,
                kernel_rate,
            } => f
                .debug_struct("Relaxation")
                .field("f1", f1)
                .field("a", a)
                .field("f2", f2)
                .field("b", b)
                .field("kernel_rate", kernel_rate)
                .finish(),
            NonlinearityKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// The nonlinearity together with its declared Lipschitz constants `L1`
/// (state), `L2` (history), its bound `M1` and the Hölder-type exponent `p`.
/// Undeclared constants are derived from the parameters where possible.
#[derive(Debug, Clone)]
pub struct Nonlinearity<T> {
    kind: NonlinearityKind<T>,
    lipschitz_state: Option<T>,
    lipschitz_history: Option<T>,
    bound: Option<T>,
    holder_p: Option<T>,
}

impl<T: Real> Nonlinearity<T> {
    pub fn zero() -> Self {
        Self::from_kind(NonlinearityKind::Zero)
    }

    /// `f(t, x) = a x`.
    pub fn linear(a: T) -> Self {
        Self::relaxation(PointwiseMap::Linear, a, PointwiseMap::None, T::zero(), T::zero())
    }

    pub fn relaxation(f1: PointwiseMap, a: T, f2: PointwiseMap, b: T, kernel_rate: T) -> Self {
        Self::from_kind(NonlinearityKind::Relaxation {
            f1,
            a,
            f2,
            b,
            kernel_rate,
        })
    }

    pub fn custom(f: CustomFn<T>) -> Self {
        Self::from_kind(NonlinearityKind::Custom(f))
    }

    fn from_kind(kind: NonlinearityKind<T>) -> Self {
        Self {
            kind,
            lipschitz_state: None,
            lipschitz_history: None,
            bound: None,
            holder_p: None,
        }
    }

    /// Declares constants, overriding the derived ones.
    pub fn with_constants(mut self, l1: Option<T>, l2: Option<T>, m1: Option<T>) -> Self {
        self.lipschitz_state = l1.or(self.lipschitz_state);
        self.lipschitz_history = l2.or(self.lipschitz_history);
        self.bound = m1.or(self.bound);
        self
    }

    pub fn with_holder_p(mut self, p: T) -> Self {
        self.holder_p = Some(p);
        self
    }

    pub fn kind(&self) -> &NonlinearityKind<T> {
        &self.kind
    }

    pub fn holder_p(&self) -> Option<T> {
        self.holder_p
    }

    pub fn is_zero(&self) -> bool {
        match &self.kind {
            NonlinearityKind::Zero => true,
            NonlinearityKind::Relaxation { f1, a, f2, b, .. } => {
                (*f1 == PointwiseMap::None || *a == T::zero())
                    && (*f2 == PointwiseMap::None || *b == T::zero())
            }
            NonlinearityKind::Custom(_) => false,
        }
    }

    /// Affine in the state and history (custom maps are never assumed affine).
    pub fn is_affine(&self) -> bool {
        match &self.kind {
            NonlinearityKind::Zero => true,
            NonlinearityKind::Relaxation { f1, f2, .. } => f1.is_affine() && f2.is_affine(),
            NonlinearityKind::Custom(_) => false,
        }
    }

    fn memory_weight(kernel_rate: T, delay: T) -> T {
        // \int_0^r e^{-kappa tau} dtau
        if kernel_rate == T::zero() {
            delay
        } else {
            (T::one() - (-kernel_rate * delay).exp()) / kernel_rate
        }
    }

    /// `(L1, L2, M1)` for a history window of length `delay`; declared values
    /// take precedence. `None` means the constant is unknown or unbounded.
    pub fn constants(&self, delay: T) -> (Option<T>, Option<T>, Option<T>) {
        let derived = match &self.kind {
            NonlinearityKind::Zero => (Some(T::zero()), Some(T::zero()), Some(T::zero())),
            NonlinearityKind::Relaxation {
                f1,
                a,
                f2,
                b,
                kernel_rate,
            } => {
                let active1 = *f1 != PointwiseMap::None;
                let active2 = *f2 != PointwiseMap::None;
                let l1 = if active1 { a.abs() } else { T::zero() };
                let mem = Self::memory_weight(*kernel_rate, delay);
                let l2 = if active2 { b.abs() * mem } else { T::zero() };
                // |sin| <= 1 pointwise gives an L^2 bound of sqrt(pi)
                let bound_of = |map: PointwiseMap, coef: T| match map {
                    PointwiseMap::None => Some(T::zero()),
                    PointwiseMap::Sin => Some(coef.abs() * T::PI().sqrt()),
                    PointwiseMap::Linear if coef == T::zero() => Some(T::zero()),
                    PointwiseMap::Linear => None,
                };
                let m1 = match (bound_of(*f1, *a), bound_of(*f2, *b)) {
                    (Some(m_a), Some(m_b)) => Some(m_a + m_b * mem),
                    _ => None,
                };
                (Some(l1), Some(l2), m1)
            }
            NonlinearityKind::Custom(_) => (None, None, None),
        };
        (
            self.lipschitz_state.or(derived.0),
            self.lipschitz_history.or(derived.1),
            self.bound.or(derived.2),
        )
    }

    /// Instantaneous part `a f1(x)`.
    pub(crate) fn instant(&self, basis: &SineBasis<T>, x: &SpectralVector<T>) -> SpectralVector<T> {
        match &self.kind {
            NonlinearityKind::Relaxation { f1, a, .. } => f1.apply(basis, *a, x),
            _ => SpectralVector::zeros(x.dim()),
        }
    }

    /// Memory integrand `b f2(x(s))`, or `None` without a memory term.
    pub(crate) fn memory_integrand(
        &self,
        basis: &SineBasis<T>,
        x: &SpectralVector<T>,
    ) -> Option<SpectralVector<T>> {
        match &self.kind {
            NonlinearityKind::Relaxation { f2, b, .. } if *f2 != PointwiseMap::None => {
                Some(f2.apply(basis, *b, x))
            }
            _ => None,
        }
    }

    pub(crate) fn kernel_rate(&self) -> T {
        match &self.kind {
            NonlinearityKind::Relaxation { kernel_rate, .. } => *kernel_rate,
            _ => T::zero(),
        }
    }

    pub(crate) fn custom_fn(&self) -> Option<&CustomFn<T>> {
        match &self.kind {
            NonlinearityKind::Custom(f) => Some(f),
            _ => None,
        }
    }

    /// `f(t, x, x_t)`. The memory integral over the window is taken by the
    /// composite trapezoid rule on the history samples.
    pub fn eval(
        &self,
        basis: &SineBasis<T>,
        t: T,
        x: &SpectralVector<T>,
        hist: &HistorySegment<T>,
    ) -> Result<SpectralVector<T>> {
        let value = match &self.kind {
            NonlinearityKind::Zero => SpectralVector::zeros(x.dim()),
            NonlinearityKind::Custom(f) => f(t, x, hist).map_err(|reason| Error::Nonlinearity {
                t: t.as_f64(),
                reason,
            })?,
            NonlinearityKind::Relaxation { kernel_rate, .. } => {
                let mut out = self.instant(basis, x);
                let count = hist.len();
                if count > 1 && self.memory_integrand(basis, x).is_some() {
                    let half_step = hist.step() * T::lit(0.5);
                    let weight = |node: usize| {
                        let lag = T::from_count(count - 1 - node) * hist.step();
                        (-*kernel_rate * lag).exp() * half_step
                    };
                    for j in 0..count - 1 {
                        let start = self.memory_integrand(basis, &hist.right()[j]).expect("memory");
                        let end = self.memory_integrand(basis, &hist.left()[j + 1]).expect("memory");
                        out.axpy(weight(j), &start);
                        out.axpy(weight(j + 1), &end);
                    }
                }
                out
            }
        };
        if value.dim() != x.dim() {
            return Err(Error::Nonlinearity {
                t: t.as_f64(),
                reason: format!("returned {} modes, expected {}", value.dim(), x.dim()),
            });
        }
        if !value.is_finite() {
            return Err(Error::Nonlinearity {
                t: t.as_f64(),
                reason: "non-finite value".into(),
            });
        }
        Ok(value)
    }
}
