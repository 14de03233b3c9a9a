use crate::error::{Error, Result};
use crate::scalar::Real;

use super::SpectralVector;

/// Samples of `x(t + s)` for `s` in `[-r, 0]` on a uniform sub-grid, oldest
/// first. Each node carries the value approached from the left and the value
/// leaving to the right; they differ only at impulse nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct HistorySegment<T> {
    step: T,
    left: Vec<SpectralVector<T>>,
    right: Vec<SpectralVector<T>>,
}

impl<T: Real> HistorySegment<T> {
    /// Continuous samples. A single sample describes a zero-length window.
    pub fn from_samples(step: T, samples: Vec<SpectralVector<T>>) -> Result<Self> {
        Self::with_limits(step, samples.clone(), samples)
    }

    pub fn with_limits(
        step: T,
        left: Vec<SpectralVector<T>>,
        right: Vec<SpectralVector<T>>,
    ) -> Result<Self> {
        if left.is_empty() || left.len() != right.len() {
            return Err(Error::Domain(
                "history needs matching, non-empty left and right samples".into(),
            ));
        }
        if left.len() > 1 && !(step > T::zero()) {
            return Err(Error::Domain(format!("history step {step} must be positive")));
        }
        let dim = left[0].dim();
        if left.iter().chain(&right).any(|v| v.dim() != dim) {
            return Err(Error::Domain("history samples differ in dimension".into()));
        }
        Ok(Self { step, left, right })
    }

    /// Constant history of window length `step * (count - 1)`.
    pub fn constant(step: T, count: usize, value: SpectralVector<T>) -> Result<Self> {
        Self::from_samples(step, vec![value; count.max(1)])
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn window(&self) -> T {
        if self.left.len() <= 1 {
            T::zero()
        } else {
            self.step * T::from_count(self.left.len() - 1)
        }
    }

    pub fn dim(&self) -> usize {
        self.left[0].dim()
    }

    /// Left-limit samples (the value at each node).
    pub fn left(&self) -> &[SpectralVector<T>] {
        &self.left
    }

    pub fn right(&self) -> &[SpectralVector<T>] {
        &self.right
    }

    /// The current state `x(t)`.
    pub fn current(&self) -> &SpectralVector<T> {
        self.left.last().expect("non-empty history")
    }

    /// Phase-space norm: the largest sample norm.
    pub fn sup_norm(&self) -> T {
        self.left
            .iter()
            .chain(&self.right)
            .fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn sup_distance(&self, other: &Self) -> T {
        let l = self.left.iter().zip(&other.left);
        let r = self.right.iter().zip(&other.right);
        l.chain(r).fold(T::zero(), |m, (a, b)| m.max(a.distance(b)))
    }
}
