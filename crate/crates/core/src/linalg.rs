//! Small dense linear algebra on row-major square matrices: products,
//! Cholesky solves and cyclic Jacobi eigenvalues for symmetric matrices.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Config(format!("matrix must be {n}x{n}")));
        }
        Ok(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn transpose_mul_vec(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * vi;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == T::zero())
    }

    /// Adds `shift` to the diagonal.
    pub fn shifted(&self, shift: T) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] = m[(i, i)] + shift;
        }
        m
    }

    /// Spectral norm, from the largest eigenvalue of `A^T A`.
    pub fn spectral_norm(&self) -> T {
        let gram = self.transpose().matmul(self);
        symmetric_eigenvalues(&gram)
            .last()
            .copied()
            .unwrap_or_else(T::zero)
            .max(T::zero())
            .sqrt()
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Lower Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    lower: DenseMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn factor(a: &DenseMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let mut l = DenseMatrix::zeros(n);
        for j in 0..n {
            let mut diag = a[(j, j)];
            for k in 0..j {
                diag = diag - l[(j, k)] * l[(j, k)];
            }
            if !(diag > T::zero()) {
                return Err(Error::Numerical(format!(
                    "matrix is not positive definite (pivot {j} = {diag})"
                )));
            }
            let d = diag.sqrt();
            l[(j, j)] = d;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { lower: l })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lower.dim();
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - l[(i, k)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s = s - l[(k, i)] * y[k];
            }
            y[i] = s / l[(i, i)];
        }
        y
    }
}

/// Eigenvalues of a symmetric matrix in ascending order (cyclic Jacobi).
pub fn symmetric_eigenvalues<T: Real>(a: &DenseMatrix<T>) -> Vec<T> {
    let n = a.dim();
    let mut m = a.clone();
    let scale = m.max_abs();
    if scale == T::zero() {
        return vec![T::zero(); n];
    }
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off = off + m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= T::epsilon() * lit(1e-2) * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (lit::<T>(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = (t * t + T::one()).sqrt().recip();
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| m[(i, i)]).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    eig
}
