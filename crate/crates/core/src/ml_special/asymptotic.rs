use crate::scalar::Real;

use super::branch_cut::pole_residues;
use super::gamma::recip_gamma;

const MAX_TERMS: usize = 400;

pub(crate) struct Expansion<T> {
    pub value: T,
    /// Magnitude of the first omitted term.
    pub truncation: T,
}

/// Large-|z| expansion on the negative axis:
/// E_{alpha,beta}(z) ~ poles - sum_{k>=1} z^{-k} / Gamma(beta - alpha k),
/// truncated just before the smallest term.
pub(crate) fn expand<T: Real>(alpha: T, beta: T, x: T) -> Expansion<T> {
    let z = -x;
    let inv_z = z.recip();
    let mut power = T::one();
    let mut tail = T::zero();
    let mut previous = T::infinity();
    let mut truncation = T::zero();
    for k in 1..=MAX_TERMS {
        power = power * inv_z;
        let term = power * recip_gamma(beta - alpha * T::from_count(k));
        let size = term.abs();
        if size == T::zero() {
            // Gamma pole: term vanishes identically
            continue;
        }
        if size > previous || !size.is_finite() {
            truncation = previous;
            break;
        }
        tail = tail - term;
        previous = size;
        truncation = size;
        if size <= T::epsilon() * tail.abs() * T::epsilon() {
            break;
        }
    }
    Expansion {
        value: pole_residues(alpha, beta, x) + tail,
        truncation,
    }
}
