use crate::scalar::{lit, Real};

use super::SpectralVector;

/// Sine basis `sqrt(2/pi) sin(n y)`, `n = 1..=N`, sampled on the interior
/// points `y_j = j pi / M`, `j = 1..M-1`. With `M > N` the discrete sine
/// transform makes reconstruction followed by projection exact.
#[derive(Debug, Clone)]
pub struct SineBasis<T> {
    modes: usize,
    points: usize,
    // table[j * modes + n] = sqrt(2/pi) sin((n+1) y_j)
    table: Vec<T>,
}

impl<T: Real> SineBasis<T> {
    /// Basis with the default resolution of `8 N` subintervals.
    pub fn new(modes: usize) -> Self {
        Self::with_resolution(modes, 8 * modes.max(1))
    }

    /// `subintervals` is `M`; it must exceed the mode count.
    pub fn with_resolution(modes: usize, subintervals: usize) -> Self {
        assert!(subintervals > modes, "need more subintervals than modes");
        let points = subintervals - 1;
        let norm = (lit::<T>(2.0) / T::PI()).sqrt();
        let mut table = Vec::with_capacity(points * modes);
        for j in 1..=points {
            for n in 1..=modes {
                // reduce (n j) mod 2M exactly before scaling by pi / M
                let phase = (n * j) % (2 * subintervals);
                let angle = T::PI() * T::from_count(phase) / T::from_count(subintervals);
                table.push(norm * angle.sin());
            }
        }
        Self {
            modes,
            points,
            table,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Interior sample points.
    pub fn grid(&self) -> Vec<T> {
        let m = T::from_count(self.points + 1);
        (1..=self.points)
            .map(|j| T::PI() * T::from_count(j) / m)
            .collect()
    }

    /// Physical-space values at the interior sample points.
    pub fn reconstruct(&self, v: &SpectralVector<T>) -> Vec<T> {
        let c = v.coeffs();
        self.table
            .chunks_exact(self.modes)
            .map(|row| row.iter().zip(c).map(|(&s, &a)| s * a).sum())
            .collect()
    }

    /// Discrete `L^2` projection of sampled values onto the retained modes.
    pub fn project(&self, values: &[T]) -> SpectralVector<T> {
        let mut out = vec![T::zero(); self.modes];
        for (row, &v) in self.table.chunks_exact(self.modes).zip(values) {
            for (o, &s) in out.iter_mut().zip(row) {
                *o = *o + s * v;
            }
        }
        let w = T::PI() / T::from_count(self.points + 1);
        SpectralVector::new(out.into_iter().map(|o| o * w).collect())
    }

    /// Applies a pointwise map in physical space and projects back.
    pub fn map_pointwise(
        &self,
        v: &SpectralVector<T>,
        mut f: impl FnMut(T) -> T,
    ) -> SpectralVector<T> {
        let values: Vec<T> = self.reconstruct(v).into_iter().map(&mut f).collect();
        self.project(&values)
    }
}
