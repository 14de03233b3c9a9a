use crate::error::{Error, Result};
use crate::quadrature::trapezoid_weight;
use crate::scalar::Real;
use crate::spectral_model::SpectralVector;

use super::TimeGrid;

/// Control samples `u(t_i)` on the forward nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSignal<T> {
    grid: TimeGrid<T>,
    samples: Vec<SpectralVector<T>>,
}

impl<T: Real> ControlSignal<T> {
    pub fn new(grid: TimeGrid<T>, samples: Vec<SpectralVector<T>>) -> Result<Self> {
        if samples.len() != grid.forward_steps() + 1 {
            return Err(Error::Domain(format!(
                "control needs {} samples, got {}",
                grid.forward_steps() + 1,
                samples.len()
            )));
        }
        if let Some(first) = samples.first() {
            if samples.iter().any(|s| s.dim() != first.dim()) {
                return Err(Error::Domain("control samples differ in dimension".into()));
            }
        }
        Ok(Self { grid, samples })
    }

    pub fn zeros(grid: TimeGrid<T>, dim: usize) -> Self {
        Self::constant(grid, SpectralVector::zeros(dim))
    }

    pub fn constant(grid: TimeGrid<T>, value: SpectralVector<T>) -> Self {
        Self {
            samples: vec![value; grid.forward_steps() + 1],
            grid,
        }
    }

    pub fn from_fn(grid: TimeGrid<T>, mut f: impl FnMut(T) -> SpectralVector<T>) -> Result<Self> {
        let samples = (0..=grid.forward_steps()).map(|i| f(grid.forward_time(i))).collect();
        Self::new(grid, samples)
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    pub fn samples(&self) -> &[SpectralVector<T>] {
        &self.samples
    }

    /// `\int_0^T ||u||^2 dt` by the trapezoid rule.
    pub fn energy(&self) -> T {
        let n = self.grid.forward_steps();
        self.samples
            .iter()
            .enumerate()
            .map(|(i, s)| trapezoid_weight(i, n, self.grid.step()) * s.norm_squared())
            .sum()
    }

    /// Largest sample distance.
    pub fn sup_distance(&self, other: &Self) -> T {
        self.samples
            .iter()
            .zip(&other.samples)
            .fold(T::zero(), |m, (a, b)| m.max(a.distance(b)))
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Self {
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| {
                let mut v = x.scaled(a);
                v.axpy(b, y);
                v
            })
            .collect();
        Self {
            grid: self.grid,
            samples,
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|s| s.scaled(a)).collect(),
        }
    }
}
