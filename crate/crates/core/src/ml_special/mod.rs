//! Two-parameter Mittag-Leffler function E_{alpha,beta}(z) on the real axis
//! and the diagonal solution operator built from it.
//!
//! On an eigenvector of the state operator with eigenvalue `lambda`, the
//! fractional solution operator acts as multiplication by
//! `E_{alpha,1}(lambda t^alpha)`. Evaluation picks one of four regimes:
//!
//! * closed forms (`z = 0`, `E_{1,1} = exp`, `E_{2,1}(-x) = cos(sqrt x)`);
//! * the power series, for `z > 0` and for small `|z|` on the negative axis;
//! * the branch-cut integral, for moderate negative `z`;
//! * the large-argument expansion, for `z < -50` whenever its smallest-term
//!   truncation is below the accuracy target, falling back to the branch-cut
//!   integral otherwise.

mod asymptotic;
mod branch_cut;
mod gamma;
mod series;

pub use gamma::{gamma, ln_gamma, recip_gamma};

use crate::error::{Error, Regime, Result};
use crate::scalar::{lit, Real};

/// Negative arguments with `|z|` at or below this are summed as a series.
pub const SERIES_RADIUS: f64 = 2.0;

/// Negative arguments beyond this may use the large-argument expansion.
pub const ASYMPTOTIC_THRESHOLD: f64 = 50.0;

/// A validated evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlQuery<T> {
    alpha: T,
    beta: T,
    z: T,
}

impl<T: Real> MlQuery<T> {
    pub fn new(alpha: T, beta: T, z: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha <= lit(2.0)) {
            return Err(Error::Parameter(format!("alpha = {alpha} must lie in (0, 2]")));
        }
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(Error::Parameter(format!("beta = {beta} must be positive")));
        }
        if !z.is_finite() {
            return Err(Error::Parameter(format!("z = {z} must be finite")));
        }
        Ok(Self { alpha, beta, z })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn z(&self) -> T {
        self.z
    }
}

/// Accuracy the series regime must certify before its value is accepted.
fn series_target<T: Real>() -> T {
    lit::<T>(1e-11).max(T::epsilon() * lit(1e4))
}

/// Relative truncation the asymptotic regime must certify.
fn asymptotic_target<T: Real>() -> T {
    lit::<T>(1e-10).max(T::epsilon() * lit(1e3))
}

/// Value together with the regime that produced it.
pub fn ml_eval_with_regime<T: Real>(q: &MlQuery<T>) -> Result<(T, Regime)> {
    let (alpha, beta, z) = (q.alpha, q.beta, q.z);
    let one = T::one();

    if z == T::zero() {
        return Ok((recip_gamma(beta), Regime::Closed));
    }
    if alpha == one && beta == one {
        return Ok((z.exp(), Regime::Closed));
    }
    if alpha == lit(2.0) && beta == one && z < T::zero() {
        return Ok(((-z).sqrt().cos(), Regime::Closed));
    }

    if z > T::zero() || z.abs() <= lit(SERIES_RADIUS) {
        let sum = series::taylor(alpha, beta, z)?;
        return Ok((sum.value, Regime::Series));
    }

    let x = -z;
    if x > lit(ASYMPTOTIC_THRESHOLD) {
        let expansion = asymptotic::expand(alpha, beta, x);
        if expansion.value.is_finite()
            && expansion.truncation <= asymptotic_target::<T>() * expansion.value.abs()
        {
            return Ok((expansion.value, Regime::Asymptotic));
        }
    }

    if alpha == one {
        // the pole lies on the cut; use exp plus the upward recurrence for
        // integer beta, otherwise a certified series
        let nearest = beta.round();
        if (beta - nearest).abs() <= T::epsilon() * lit(16.0) && nearest >= one {
            let mut value = z.exp();
            let mut b = one;
            while b < nearest {
                value = (value - recip_gamma(b)) / z;
                b = b + one;
            }
            return Ok((value, Regime::Closed));
        }
        let sum = series::taylor(alpha, beta, z)?;
        if sum.error_bound > series_target::<T>() {
            return Err(Error::Evaluation {
                regime: Regime::Series,
                reason: format!(
                    "cancellation leaves error bound {:e} at z = {z}",
                    sum.error_bound.as_f64()
                ),
            });
        }
        return Ok((sum.value, Regime::Series));
    }

    let value = branch_cut::evaluate(alpha, beta, x)?;
    Ok((value, Regime::BranchCut))
}

/// E_{alpha,beta}(z).
pub fn ml_eval<T: Real>(q: &MlQuery<T>) -> Result<T> {
    ml_eval_with_regime(q).map(|(v, _)| v)
}

/// Convenience wrapper validating the arguments on the fly.
pub fn mittag_leffler<T: Real>(alpha: T, beta: T, z: T) -> Result<T> {
    ml_eval(&MlQuery::new(alpha, beta, z)?)
}

/// The large-argument expansion on its own, with its truncation estimate.
/// Exposed for regime-consistency diagnostics; `z` must be negative.
pub fn ml_asymptotic<T: Real>(q: &MlQuery<T>) -> Result<(T, T)> {
    if q.z >= T::zero() {
        return Err(Error::Domain("asymptotic expansion needs z < 0".into()));
    }
    let e = asymptotic::expand(q.alpha, q.beta, -q.z);
    Ok((e.value, e.truncation))
}

/// The branch-cut representation on its own; `z` must be negative and
/// `alpha != 1`.
pub fn ml_branch_cut<T: Real>(q: &MlQuery<T>) -> Result<T> {
    if q.z >= T::zero() || q.alpha == T::one() {
        return Err(Error::Domain(
            "branch-cut representation needs z < 0 and alpha != 1".into(),
        ));
    }
    branch_cut::evaluate(q.alpha, q.beta, -q.z)
}

/// Diagonal of the solution operator at time `t`: `E_{alpha,1}(lambda_n t^alpha)`.
pub fn solution_operator_diag<T: Real>(t: T, alpha: T, eigs: &[T]) -> Result<Vec<T>> {
    if !(alpha > T::one() && alpha < lit(2.0)) {
        return Err(Error::Parameter(format!("alpha = {alpha} must lie in (1, 2)")));
    }
    if !(t >= T::zero()) {
        return Err(Error::Parameter(format!("t = {t} must be non-negative")));
    }
    if let Some(bad) = eigs.iter().find(|&&l| !(l <= T::zero())) {
        return Err(Error::Parameter(format!(
            "eigenvalue {bad} is positive; the operator must be of negative type"
        )));
    }
    let t_pow = t.powf(alpha);
    eigs.iter()
        .map(|&lambda| mittag_leffler(alpha, T::one(), lambda * t_pow))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_and_cosine_identities() {
        let e = mittag_leffler(1.0_f64, 1.0, 1.0).unwrap();
        assert!((e - std::f64::consts::E).abs() < 1e-15);
        let c = mittag_leffler(2.0_f64, 1.0, -4.0).unwrap();
        assert!((c - 2.0_f64.cos()).abs() < 1e-15);
        // E_{2,1} through the series regime as well
        let c_small = mittag_leffler(2.0_f64, 1.0, -1.5).unwrap();
        assert!((c_small - 1.5_f64.sqrt().cos()).abs() < 1e-14);
    }

    #[test]
    fn origin_is_reciprocal_gamma() {
        assert_eq!(mittag_leffler(1.5_f64, 1.0, 0.0).unwrap(), 1.0);
        let v = mittag_leffler(1.5_f64, 2.5, 0.0).unwrap();
        assert!((v - 1.0 / 1.329_340_388_179_137).abs() < 1e-14);
    }

    #[test]
    fn alpha_one_closed_forms() {
        // E_{1,2}(z) = (e^z - 1) / z
        let z = -7.5_f64;
        let v = mittag_leffler(1.0, 2.0, z).unwrap();
        assert!((v - (z.exp() - 1.0) / z).abs() < 1e-15);
    }

    #[test]
    fn alpha_one_non_integer_beta_reports_cancellation() {
        let err = mittag_leffler(1.0_f64, 1.5, -45.0).unwrap_err();
        match err {
            Error::Evaluation { regime, .. } => assert_eq!(regime, Regime::Series),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_out_of_range_parameters() {
        assert!(MlQuery::new(0.0_f64, 1.0, 0.0).is_err());
        assert!(MlQuery::new(2.1_f64, 1.0, 0.0).is_err());
        assert!(MlQuery::new(1.5_f64, 0.0, 0.0).is_err());
        assert!(MlQuery::new(1.5_f64, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn solution_operator_is_identity_at_zero() {
        let d = solution_operator_diag(0.0_f64, 1.5, &[-1.0, -4.0]).unwrap();
        assert_eq!(d, vec![1.0, 1.0]);
    }

    #[test]
    fn solution_operator_cosine_limit() {
        let d = solution_operator_diag(1.0_f64, 2.0 - 1e-12, &[-4.0]).unwrap();
        assert!((d[0] - 2.0_f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn solution_operator_rejects_positive_eigenvalue() {
        assert!(solution_operator_diag(1.0_f64, 1.5, &[-1.0, 0.5]).is_err());
        assert!(solution_operator_diag(1.0_f64, 0.9, &[-1.0]).is_err());
        assert!(solution_operator_diag(-1.0_f64, 1.5, &[-1.0]).is_err());
    }

    #[test]
    fn regimes_agree_across_series_radius() {
        for &alpha in &[1.1_f64, 1.5, 1.9] {
            let a = mittag_leffler(alpha, 1.0, -SERIES_RADIUS).unwrap();
            let q = MlQuery::new(alpha, 1.0, -SERIES_RADIUS).unwrap();
            let b = ml_branch_cut(&q).unwrap();
            assert!((a - b).abs() < 1e-13, "alpha {alpha}: {a} vs {b}");
        }
    }

    #[test]
    fn recurrence_holds_on_grid() {
        for &alpha in &[1.1_f64, 1.5, 1.9] {
            for i in 0..=50 {
                let z = -20.0 + 25.0 * i as f64 / 50.0;
                let lhs = mittag_leffler(alpha, 1.0, z).unwrap();
                let rhs = z * mittag_leffler(alpha, alpha + 1.0, z).unwrap() + 1.0;
                assert!((lhs - rhs).abs() < 1e-9, "alpha {alpha}, z {z}");
            }
        }
    }

    #[test]
    fn single_precision_tracks_double() {
        for &z in &[-0.5_f64, -3.0, -30.0, -80.0, 2.0] {
            let d = mittag_leffler(1.5_f64, 1.0, z).unwrap();
            let s = mittag_leffler(1.5_f32, 1.0, z as f32).unwrap();
            assert!((d - s as f64).abs() < 1e-5, "z {z}: {d} vs {s}");
        }
    }
}
