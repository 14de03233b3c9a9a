//! E_{alpha,beta}(-x) for x > 0 from the Laplace-transform pair
//! t^{beta-1} E_{alpha,beta}(-x t^alpha) <-> s^{alpha-beta} / (s^alpha + x)
//! evaluated at t = 1. The Bromwich contour is collapsed onto the negative
//! real axis; for alpha > 1 the two simple poles s = x^{1/alpha} e^{+-i pi/alpha}
//! sit on the principal sheet and contribute residues.

use crate::error::Result;
use crate::quadrature::integrate;
use crate::scalar::{lit, Real};

use super::gamma::recip_gamma;

/// Contribution of the conjugate pole pair, `(2/alpha) Re[e^s s^{1-beta}]`.
/// Zero for `alpha <= 1` where the poles leave the principal sheet.
pub(crate) fn pole_residues<T: Real>(alpha: T, beta: T, x: T) -> T {
    if alpha <= T::one() {
        return T::zero();
    }
    let rho = x.powf(alpha.recip());
    let theta = T::PI() / alpha;
    let one_minus_beta = T::one() - beta;
    let modulus = (rho * theta.cos()).exp() * rho.powf(one_minus_beta);
    let phase = rho * theta.sin() + one_minus_beta * theta;
    lit::<T>(2.0) / alpha * modulus * phase.cos()
}

fn cut_integral<T: Real>(alpha: T, beta: T, x: T) -> Result<T> {
    let pi = T::PI();
    // r^{alpha-beta} dr = dv / gamma_exp under r = v^{1/gamma_exp}
    let gamma_exp = alpha - beta + T::one();
    let inv_gamma_exp = gamma_exp.recip();
    let sin_beta = (pi * beta).sin();
    let sin_shift = (pi * (alpha - beta)).sin();
    let cos_alpha = (pi * alpha).cos();

    let integrand = |v: T| -> T {
        if v <= T::zero() {
            // N/D at r = 0
            return -sin_shift / x;
        }
        let r = v.powf(inv_gamma_exp);
        let ra = r.powf(alpha);
        let numer = ra * sin_beta - x * sin_shift;
        let denom = ra * ra + lit::<T>(2.0) * x * ra * cos_alpha + x * x;
        (-r).exp() * numer / denom
    };

    let r_max = -T::epsilon().ln() * lit(1.4);
    let mut breaks = vec![T::zero(), T::one().min(r_max)];
    // near-resonance of the denominator at r^alpha = -x cos(pi alpha)
    let r_peak = if cos_alpha < T::zero() {
        (-x * cos_alpha).powf(alpha.recip())
    } else {
        x.powf(alpha.recip())
    };
    for scale in [0.5, 0.9, 1.0, 1.1, 2.0] {
        let r = r_peak * lit(scale);
        if r > T::zero() && r < r_max {
            breaks.push(r);
        }
    }
    breaks.push(r_max);
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    breaks.dedup();

    let abs_tol = T::epsilon() * lit(16.0) * T::one().min(x.recip());
    let share = abs_tol / T::from_count(breaks.len());
    let mut total = T::zero();
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0].powf(gamma_exp), pair[1].powf(gamma_exp));
        total = total + integrate(integrand, a, b, share)?;
    }
    Ok(total / (pi * gamma_exp))
}

/// E_{alpha,beta}(-x) for x > 0 and alpha in (0, 2], alpha != 1.
pub(crate) fn evaluate<T: Real>(alpha: T, beta: T, x: T) -> Result<T> {
    // the substitution needs beta < alpha + 1; shift beta down through
    // E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z
    if beta > alpha + lit(0.95) {
        let lower = evaluate(alpha, beta - alpha, x)?;
        return Ok((lower - recip_gamma(beta - alpha)) / (-x));
    }
    Ok(pole_residues(alpha, beta, x) + cut_integral(alpha, beta, x)?)
}
