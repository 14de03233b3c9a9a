use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::Serialize;

use crate::scalar::Real;

/// Coefficients of a state in the orthonormal sine basis of `L^2(0, pi)`.
/// The Euclidean norm of the coefficients is the `L^2` norm of the state.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct SpectralVector<T> {
    coeffs: Vec<T>,
}

impl<T: Real> SpectralVector<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            coeffs: vec![T::zero(); dim],
        }
    }

    /// `amplitude` times the basis vector of (1-based) mode `mode`.
    pub fn mode(dim: usize, mode: usize, amplitude: T) -> Self {
        let mut v = Self::zeros(dim);
        v.coeffs[mode - 1] = amplitude;
        v
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn norm_squared(&self) -> T {
        self.coeffs.iter().map(|&c| c * c).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a * b).sum()
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: T, x: &Self) {
        for (s, &v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s = *s + a * v;
        }
    }

    /// Componentwise product, used for diagonal operators.
    pub fn hadamard(&self, diag: &[T]) -> Self {
        Self::new(self.coeffs.iter().zip(diag).map(|(&a, &d)| a * d).collect())
    }

    pub fn scaled(&self, a: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| a * c).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, &c| m.max(c.abs()))
    }
}

impl<T> Index<usize> for SpectralVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.coeffs[i]
    }
}

impl<T> IndexMut<usize> for SpectralVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.coeffs[i]
    }
}

impl<T: Real> Add for &SpectralVector<T> {
    type Output = SpectralVector<T>;
    fn add(self, rhs: Self) -> SpectralVector<T> {
        SpectralVector::new(self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a + b).collect())
    }
}

impl<T: Real> Sub for &SpectralVector<T> {
    type Output = SpectralVector<T>;
    fn sub(self, rhs: Self) -> SpectralVector<T> {
        SpectralVector::new(self.coeffs.iter().zip(&rhs.coeffs).map(|(&a, &b)| a - b).collect())
    }
}

impl<T: Real> Add for SpectralVector<T> {
    type Output = SpectralVector<T>;
    fn add(self, rhs: Self) -> SpectralVector<T> {
        &self + &rhs
    }
}

impl<T: Real> Sub for SpectralVector<T> {
    type Output = SpectralVector<T>;
    fn sub(self, rhs: Self) -> SpectralVector<T> {
        &self - &rhs
    }
}

impl<T: Real> Mul<T> for &SpectralVector<T> {
    type Output = SpectralVector<T>;
    fn mul(self, a: T) -> SpectralVector<T> {
        self.scaled(a)
    }
}

impl<T: Real> Neg for &SpectralVector<T> {
    type Output = SpectralVector<T>;
    fn neg(self) -> SpectralVector<T> {
        self.scaled(-T::one())
    }
}

impl<T: Real> From<Vec<T>> for SpectralVector<T> {
    fn from(coeffs: Vec<T>) -> Self {
        Self::new(coeffs)
    }
}
