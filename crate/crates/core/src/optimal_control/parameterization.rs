use crate::error::{Error, Result};
use crate::mild_solver::{ControlSignal, TimeGrid};
use crate::scalar::Real;
use crate::spectral_model::SpectralVector;

/// Piecewise constant controls on `P` equal intervals of `[0, T]`, with one
/// coefficient per interval and mode, inside a closed box.
///
/// Coefficient `k * dim + m` is mode `m` on interval `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlParameterization<T> {
    intervals: usize,
    dim: usize,
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Real> ControlParameterization<T> {
    pub fn new(intervals: usize, dim: usize, lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if intervals == 0 || dim == 0 {
            return Err(Error::Config("need at least one interval and one mode".into()));
        }
        let len = intervals * dim;
        if lower.len() != len || upper.len() != len {
            return Err(Error::Config(format!("box needs {len} lower and upper bounds")));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::Config("box is empty".into()));
        }
        Ok(Self {
            intervals,
            dim,
            lower,
            upper,
        })
    }

    /// Same bounds `[lo, hi]` for every coefficient.
    pub fn uniform(intervals: usize, dim: usize, lo: T, hi: T) -> Result<Self> {
        let len = intervals * dim;
        Self::new(intervals, dim, vec![lo; len], vec![hi; len])
    }

    pub fn unbounded(intervals: usize, dim: usize) -> Result<Self> {
        Self::uniform(intervals, dim, T::neg_infinity(), T::infinity())
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of coefficients.
    pub fn len(&self) -> usize {
        self.intervals * self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn contains(&self, params: &[T]) -> bool {
        params.len() == self.len()
            && params
                .iter()
                .enumerate()
                .all(|(k, &p)| p >= self.lower[k] && p <= self.upper[k])
    }

    /// Closest point of the box.
    pub fn project(&self, params: &[T]) -> Vec<T> {
        params
            .iter()
            .enumerate()
            .map(|(k, &p)| p.max(self.lower[k]).min(self.upper[k]))
            .collect()
    }

    /// Interval holding forward node `i` of `n`; a node on a boundary starts
    /// the next interval.
    pub fn interval_of(&self, i: usize, n: usize) -> usize {
        (i * self.intervals)
            .checked_div(n)
            .map_or(0, |k| k.min(self.intervals - 1))
    }

    /// Control samples on the forward nodes of `grid`.
    pub fn expand(&self, grid: TimeGrid<T>, params: &[T]) -> Result<ControlSignal<T>> {
        if params.len() != self.len() {
            return Err(Error::Domain(format!("expected {} coefficients", self.len())));
        }
        let n = grid.forward_steps();
        let samples = (0..=n)
            .map(|i| {
                let k = self.interval_of(i, n);
                SpectralVector::new(params[k * self.dim..(k + 1) * self.dim].to_vec())
            })
            .collect();
        ControlSignal::new(grid, samples)
    }
}
