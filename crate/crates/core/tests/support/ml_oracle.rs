//! Extended-precision Mittag-Leffler reference: the defining power series
//! summed with ~96 significant digits. Gamma values come from Stirling's
//! series with exact Bernoulli numbers after an upward shift of the argument.
//! Shares no code with the library evaluator.

use dashu_float::FBig;
use dashu_int::IBig;
use dashu_ratio::RBig;

type F = FBig;

const PREC: usize = 320;
const STIRLING_TERMS: usize = 40;
const SHIFT_TARGET: i64 = 64;

fn int(n: i64) -> F {
    F::from(n).with_precision(PREC).value()
}

fn exact(x: f64) -> F {
    F::try_from(x)
        .expect("finite f64")
        .with_precision(PREC)
        .value()
}

fn ratio(r: &RBig) -> F {
    let num = F::from(r.numerator().clone()).with_precision(PREC).value();
    let den = F::from(IBig::from(r.denominator().clone()))
        .with_precision(PREC)
        .value();
    num / den
}

fn arctan_recip(m: i64) -> F {
    // atan(1/m) = sum (-1)^k / ((2k+1) m^(2k+1))
    let m_f = int(m);
    let m2 = &m_f * &m_f;
    let mut power = m_f.clone();
    let mut sum = int(0);
    let threshold = int(1) / int(10).powi(IBig::from(100));
    for k in 0..10_000i64 {
        let term = int(1) / (int(2 * k + 1) * &power);
        if term < threshold {
            break;
        }
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &m2;
    }
    sum
}

fn bernoulli_even(count: usize) -> Vec<RBig> {
    // Akiyama-Tanigawa; returns B_2, B_4, ..., B_{2 count}
    let n = 2 * count;
    let mut row: Vec<RBig> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(count);
    for m in 0..=n {
        row.push(RBig::from_parts(IBig::from(1), (m as u64 + 1).into()));
        for j in (1..=m).rev() {
            let diff = &row[j - 1] - &row[j];
            row[j - 1] = diff * RBig::from(j as u64);
        }
        if m >= 2 && m % 2 == 0 {
            out.push(row[0].clone());
        }
    }
    out
}

/// Reference series evaluator for one `(alpha, beta)` pair.
pub struct MlOracle {
    recip_gamma: Vec<F>,
}

struct GammaContext {
    half_ln_two_pi: F,
    stirling: Vec<F>,
}

impl GammaContext {
    fn new() -> Self {
        let pi = int(16) * arctan_recip(5) - int(4) * arctan_recip(239);
        let half_ln_two_pi = (int(2) * pi).ln() / int(2);
        let stirling = bernoulli_even(STIRLING_TERMS)
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let m = (i + 1) as i64;
                ratio(b) / int(2 * m * (2 * m - 1))
            })
            .collect();
        Self {
            half_ln_two_pi,
            stirling,
        }
    }

    fn gamma(&self, x: &F) -> F {
        assert!(*x > int(0), "oracle gamma needs a positive argument");
        let mut y = x.clone();
        let mut divisor = int(1);
        while y < int(SHIFT_TARGET) {
            divisor *= &y;
            y += int(1);
        }
        let half = int(1) / int(2);
        let mut ln_gamma = (&y - &half) * y.ln() - &y + &self.half_ln_two_pi;
        let y2 = &y * &y;
        let mut y_pow = y.clone();
        for c in &self.stirling {
            ln_gamma += c / &y_pow;
            y_pow *= &y2;
        }
        ln_gamma.exp() / divisor
    }
}

impl MlOracle {
    /// Precomputes `1 / Gamma(alpha k + beta)` for `terms` powers.
    pub fn new(alpha: f64, beta: f64, terms: usize) -> Self {
        assert!(terms >= 200, "the reference sums at least 200 terms");
        let ctx = GammaContext::new();
        let a = exact(alpha);
        let b = exact(beta);
        let recip_gamma = (0..terms)
            .map(|k| int(1) / ctx.gamma(&(&a * int(k as i64) + &b)))
            .collect();
        Self { recip_gamma }
    }

    pub fn eval(&self, z: f64) -> f64 {
        let z = exact(z);
        let mut power = int(1);
        let mut sum = int(0);
        for r in &self.recip_gamma {
            sum += &power * r;
            power *= &z;
        }
        sum.to_f64().value()
    }
}
