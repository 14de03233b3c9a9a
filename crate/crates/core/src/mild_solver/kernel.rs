use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ml_special::mittag_leffler;
use crate::scalar::{lit, Real};
use crate::spectral_model::SpectralVector;

/// Diagonal of the solution operator at lags `0, h, 2h, ...`:
/// `values[j][n] = E_{alpha,1}(lambda_n (j h)^alpha)`.
#[derive(Debug, Clone)]
pub struct KernelTable<T> {
    step: T,
    values: Vec<Vec<T>>,
}

impl<T: Real> KernelTable<T> {
    /// Table for lags `0..=max_lag`. Eigenvalues must be non-positive.
    pub fn new(alpha: T, eigenvalues: &[T], step: T, max_lag: usize) -> Result<Self> {
        if let Some(bad) = eigenvalues.iter().find(|&&l| !(l <= T::zero())) {
            return Err(Error::Parameter(format!("eigenvalue {bad} must be non-positive")));
        }
        let values = (0..=max_lag)
            .into_par_iter()
            .map(|j| {
                let t_pow = (step * T::from_count(j)).powf(alpha);
                eigenvalues
                    .iter()
                    .map(|&lambda| {
                        if j == 0 {
                            Ok(T::one())
                        } else {
                            mittag_leffler(alpha, T::one(), lambda * t_pow)
                        }
                    })
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { step, values })
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    pub fn at(&self, lag: usize) -> &[T] {
        &self.values[lag]
    }

    /// `S(lag h) v`.
    pub fn apply(&self, lag: usize, v: &SpectralVector<T>) -> SpectralVector<T> {
        v.hadamard(&self.values[lag])
    }

    /// `\int_0^{t_i} S(t_i - s) w(s) ds` by the composite trapezoid rule on
    /// forward nodes. `left[j]` and `right[j]` are the one-sided values of the
    /// forcing at node `j` (equal where it is continuous).
    pub fn convolve_at(&self, left: &[SpectralVector<T>], right: &[SpectralVector<T>], i: usize) -> SpectralVector<T> {
        let dim = left.first().map_or(0, |v| v.dim());
        let half = self.step * lit(0.5);
        let mut acc = vec![T::zero(); dim];
        for j in 0..i {
            let k_start = &self.values[i - j];
            let k_end = &self.values[i - j - 1];
            let (a, b) = (right[j].coeffs(), left[j + 1].coeffs());
            for n in 0..dim {
                acc[n] = acc[n] + k_start[n] * a[n] + k_end[n] * b[n];
            }
        }
        SpectralVector::new(acc.into_iter().map(|v| v * half).collect())
    }

    /// [`Self::convolve_at`] for every node `0..left.len()`. Nodes are
    /// processed in parallel; each sum runs in a fixed order.
    pub fn convolve_all(&self, left: &[SpectralVector<T>], right: &[SpectralVector<T>]) -> Vec<SpectralVector<T>> {
        (0..left.len())
            .into_par_iter()
            .map(|i| self.convolve_at(left, right, i))
            .collect()
    }
}
