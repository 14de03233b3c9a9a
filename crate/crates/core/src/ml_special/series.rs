use crate::error::{Error, Regime, Result};
use crate::scalar::{lit, Real};

use super::gamma::{gamma, ln_gamma};

const MAX_TERMS: usize = 20_000;

/// Power series sum together with a running rounding-error bound.
pub(crate) struct SeriesSum<T> {
    pub value: T,
    pub error_bound: T,
}

fn largest_direct_gamma_arg<T: Real>() -> T {
    // Gamma overflows just above 171.6 in f64 and 35.0 in f32
    if T::max_value().as_f64() > 1e300 {
        lit(170.0)
    } else {
        lit(34.0)
    }
}

/// Sums `sum_k z^k / Gamma(alpha k + beta)` until the tail is below rounding.
pub(crate) fn taylor<T: Real>(alpha: T, beta: T, z: T) -> Result<SeriesSum<T>> {
    let eps = T::epsilon();
    let direct_limit = largest_direct_gamma_arg::<T>();
    let ln_abs_z = z.abs().ln();
    let negative = z < T::zero();

    let mut sum = T::zero();
    let mut abs_sum = T::zero();
    let mut power = T::one();
    for k in 0..MAX_TERMS {
        let kf = T::from_count(k);
        let arg = alpha * kf + beta;
        let term = if arg < direct_limit && power.is_finite() {
            power / gamma(arg)
        } else {
            let magnitude = (kf * ln_abs_z - ln_gamma(arg)).exp();
            if negative && k % 2 == 1 {
                -magnitude
            } else {
                magnitude
            }
        };
        if !term.is_finite() {
            return Err(Error::Evaluation {
                regime: Regime::Series,
                reason: format!("term {k} overflowed"),
            });
        }
        sum = sum + term;
        abs_sum = abs_sum + term.abs();
        power = power * z;

        // past the peak the terms decay monotonically
        let past_peak = (alpha * kf).powf(alpha) > lit::<T>(2.0) * z.abs() && k > 2;
        if past_peak && term.abs() <= eps * lit(0.25) * sum.abs().max(T::min_positive_value()) {
            let error_bound = abs_sum * eps * lit(8.0) + term.abs();
            return Ok(SeriesSum {
                value: sum,
                error_bound,
            });
        }
        if z == T::zero() {
            return Ok(SeriesSum {
                value: sum,
                error_bound: T::zero(),
            });
        }
    }
    Err(Error::Evaluation {
        regime: Regime::Series,
        reason: format!("no convergence within {MAX_TERMS} terms"),
    })
}
