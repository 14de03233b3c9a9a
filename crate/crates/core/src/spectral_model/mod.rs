//! Problem description in an `N`-mode sine truncation of `L^2(0, pi)`:
//! the operator `A = d^2/dy^2 - omega` with eigenvalues `-n^2 - omega`, the
//! nonlinearity `f`, nonlocal history map `g`, impulse maps `I_k`, input
//! map `B`, and the constants of the well-posedness hypotheses.

mod basis;
pub mod config;
mod history;
mod nonlinearity;
mod problem;
mod vector;

pub use basis::SineBasis;
pub use config::{load_problem, ProblemFile, TargetFile};
pub(crate) use config::read as read_text;
pub use history::HistorySegment;
pub use nonlinearity::{CustomFn, Nonlinearity, NonlinearityKind, PointwiseMap};
pub use problem::{
    ConstantsLedger, HistoryFunction, Impulse, ImpulseMap, NonlocalTerm, ProblemParams,
    ProblemSpec,
};
pub use vector::SpectralVector;

use crate::error::{Error, Result};
use crate::mild_solver::Trajectory;
use crate::scalar::{lit, Real};

/// `f(t, x, x_t)`.
pub fn eval_f<T: Real>(
    spec: &ProblemSpec<T>,
    t: T,
    x: &SpectralVector<T>,
    hist: &HistorySegment<T>,
) -> Result<SpectralVector<T>> {
    spec.eval_f(t, x, hist)
}

/// Nonlocal map `g(x)(s) = sum_i c_i x(tau_i + s)` for `s` in `[-r, 0]`.
pub fn eval_g<T: Real>(spec: &ProblemSpec<T>, traj: &Trajectory<T>, s: T) -> Result<SpectralVector<T>> {
    let slack = lit::<T>(1e-12) * spec.horizon().max(T::one());
    if !(s >= -spec.delay() - slack && s <= slack) {
        return Err(Error::Domain(format!("s = {s} outside [-{}, 0]", spec.delay())));
    }
    let mut out = SpectralVector::zeros(spec.modes());
    for term in spec.nonlocal() {
        out.axpy(term.weight, &traj.value_at(term.anchor + s)?);
    }
    Ok(out)
}

/// Jump `I_k(x(t_k^-))`.
pub fn eval_impulse<T: Real>(
    spec: &ProblemSpec<T>,
    k: usize,
    x_left: &SpectralVector<T>,
) -> Result<SpectralVector<T>> {
    spec.eval_impulse(k, x_left)
}
