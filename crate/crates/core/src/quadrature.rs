//! Quadrature rules: adaptive Gauss-Kronrod for smooth integrands and the
//! composite trapezoid weights used on uniform time grids.

use crate::error::{Error, Regime, Result};
use crate::scalar::{lit, Real};

// 15-point Kronrod abscissae (non-negative half) and weights, with the
// embedded 7-point Gauss weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_SEGMENTS: usize = 4000;

fn kronrod15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = lit::<T>(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * lit(WGK[7]);
    let mut gauss = fc * lit(WG[3]);
    for j in 0..7 {
        let dx = radius * lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * lit(WG[j / 2]);
        }
    }
    (kronrod * radius, ((kronrod - gauss) * radius).abs())
}

struct Segment<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

/// Integrates `f` over `[a, b]` to `abs_tol` by globally adaptive bisection
/// of a 15-point Gauss-Kronrod rule. The segment with the largest error
/// estimate is split until the summed estimate meets the tolerance or
/// reaches the rounding floor of the accumulated magnitudes.
pub fn integrate<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, abs_tol: T) -> Result<T> {
    let (value, error) = kronrod15(&mut f, a, b);
    let mut segments = vec![Segment { a, b, value, error }];
    loop {
        let total: T = segments.iter().map(|s| s.value).sum();
        let total_err: T = segments.iter().map(|s| s.error).sum();
        if !total.is_finite() {
            return Err(Error::Evaluation {
                regime: Regime::BranchCut,
                reason: format!("non-finite integrand on [{a}, {b}]"),
            });
        }
        let magnitude: T = segments.iter().map(|s| s.value.abs()).sum();
        let floor = T::epsilon() * lit(50.0) * magnitude;
        if total_err <= abs_tol.max(floor) {
            return Ok(total);
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::Evaluation {
                regime: Regime::BranchCut,
                reason: format!(
                    "adaptive quadrature on [{a}, {b}] stalled at error {:e}",
                    total_err.as_f64()
                ),
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(i, _)| i)
            .expect("at least one segment");
        let seg = segments.swap_remove(worst);
        let mid = lit::<T>(0.5) * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval exhausted at machine resolution; keep its estimate
            segments.push(Segment { error: T::zero(), ..seg });
            continue;
        }
        let (lv, le) = kronrod15(&mut f, seg.a, mid);
        let (rv, re) = kronrod15(&mut f, mid, seg.b);
        segments.push(Segment { a: seg.a, b: mid, value: lv, error: le });
        segments.push(Segment { a: mid, b: seg.b, value: rv, error: re });
    }
}

/// Composite trapezoid weight of node `j` among `n + 1` uniformly spaced nodes.
#[inline]
pub fn trapezoid_weight<T: Real>(j: usize, n: usize, step: T) -> T {
    if n == 0 {
        T::zero()
    } else if j == 0 || j == n {
        step * lit(0.5)
    } else {
        step
    }
}

/// Composite trapezoid rule on uniformly spaced samples.
pub fn trapezoid<T: Real>(samples: &[T], step: T) -> T {
    let n = samples.len().saturating_sub(1);
    samples
        .iter()
        .enumerate()
        .map(|(j, &v)| trapezoid_weight(j, n, step) * v)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_integrates_polynomials_exactly() {
        // degree 20 is below the rule's degree of exactness (23)
        let v: f64 = integrate(|x: f64| x.powi(20), 0.0, 1.0, 1e-15).unwrap();
        assert!((v - 1.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v: f64 = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-14).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_is_exact_for_linear_data() {
        let h = 0.25;
        let samples: Vec<f64> = (0..=4).map(|j| 3.0 * j as f64 * h + 1.0).collect();
        assert!((trapezoid(&samples, h) - 2.5).abs() < 1e-15);
        assert_eq!(trapezoid::<f64>(&[7.0], 0.1), 0.0);
    }
}
