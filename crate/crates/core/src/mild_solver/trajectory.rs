use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::spectral_model::{HistorySegment, SpectralVector};

use super::TimeGrid;

/// Left limit and right value at one impulse node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpRecord<T> {
    /// Impulse number (0-based).
    pub impulse: usize,
    /// Global grid node.
    pub node: usize,
    pub time: T,
    pub left: SpectralVector<T>,
    pub right: SpectralVector<T>,
}

/// Piecewise-continuous path on `[-r, T]` sampled on a [`TimeGrid`].
///
/// `left[g]` is the value at node `g`, which at an impulse time is the left
/// limit `x(t_k^-)`; `right[g]` is the value carried into `(t_g, t_{g+1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    grid: TimeGrid<T>,
    left: Vec<SpectralVector<T>>,
    right: Vec<SpectralVector<T>>,
    jumps: Vec<JumpRecord<T>>,
}

impl<T: Real> Trajectory<T> {
    /// `impulse_nodes` lists `(impulse number, global node)` pairs.
    pub fn new(
        grid: TimeGrid<T>,
        left: Vec<SpectralVector<T>>,
        right: Vec<SpectralVector<T>>,
        impulse_nodes: &[(usize, usize)],
    ) -> Result<Self> {
        if left.len() != grid.len() || right.len() != grid.len() {
            return Err(Error::Domain(format!(
                "trajectory needs {} samples, got {} / {}",
                grid.len(),
                left.len(),
                right.len()
            )));
        }
        let jumps = impulse_nodes
            .iter()
            .map(|&(impulse, node)| JumpRecord {
                impulse,
                node,
                time: grid.time(node),
                left: left[node].clone(),
                right: right[node].clone(),
            })
            .collect();
        Ok(Self {
            grid,
            left,
            right,
            jumps,
        })
    }

    /// Continuous path from one sample per node.
    pub fn continuous(grid: TimeGrid<T>, values: Vec<SpectralVector<T>>) -> Result<Self> {
        Self::new(grid, values.clone(), values, &[])
    }

    pub fn grid(&self) -> &TimeGrid<T> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.left[0].dim()
    }

    pub fn left(&self) -> &[SpectralVector<T>] {
        &self.left
    }

    pub fn right(&self) -> &[SpectralVector<T>] {
        &self.right
    }

    pub fn jumps(&self) -> &[JumpRecord<T>] {
        &self.jumps
    }

    /// Value at forward node `i`.
    pub fn at_forward(&self, i: usize) -> &SpectralVector<T> {
        &self.left[self.grid.origin() + i]
    }

    /// `x(T)`.
    pub fn terminal(&self) -> &SpectralVector<T> {
        self.left.last().expect("non-empty trajectory")
    }

    /// `x(t)` for any `t` in `[-r, T]`: the node value on nodes (left limit at
    /// impulse times) and linear interpolation between nodes otherwise.
    pub fn value_at(&self, t: T) -> Result<SpectralVector<T>> {
        let h = self.grid.step();
        let offset = (t + self.grid.delay()) / h;
        let last = T::from_count(self.grid.len() - 1);
        let slack = lit::<T>(1e-9);
        if !(offset >= -slack && offset <= last + slack) {
            return Err(Error::Domain(format!(
                "t = {t} outside [{}, {}]",
                self.grid.time(0),
                self.grid.horizon()
            )));
        }
        if let Some(g) = self.grid.global_index(t) {
            return Ok(self.left[g].clone());
        }
        let g = offset.floor().to_usize().unwrap_or(0).min(self.grid.len() - 2);
        let theta = offset - T::from_count(g);
        let mut v = self.right[g].scaled(T::one() - theta);
        v.axpy(theta, &self.left[g + 1]);
        Ok(v)
    }

    /// Window `[t - r, t]` ending at global node `g`, which must be a forward
    /// node. With `from_right` the window ends at the right value.
    pub fn history_segment(&self, g: usize, from_right: bool) -> HistorySegment<T> {
        let m = self.grid.history_steps();
        assert!(g >= m && g < self.grid.len(), "window must end on a forward node");
        let mut left: Vec<_> = self.left[g - m..=g].to_vec();
        let mut right: Vec<_> = self.right[g - m..=g].to_vec();
        let end = if from_right {
            self.right[g].clone()
        } else {
            self.left[g].clone()
        };
        *left.last_mut().expect("window") = end.clone();
        *right.last_mut().expect("window") = end;
        HistorySegment::with_limits(self.grid.step(), left, right).expect("consistent window")
    }

    /// Sup over nodes of the distance between left and right samples.
    pub fn sup_distance(&self, other: &Self) -> T {
        let l = self.left.iter().zip(&other.left);
        let r = self.right.iter().zip(&other.right);
        l.chain(r).fold(T::zero(), |m, (a, b)| m.max(a.distance(b)))
    }

    /// Sup-norm over the forward nodes `[0, T]`.
    pub fn forward_sup_distance(&self, other: &Self) -> T {
        let o = self.grid.origin();
        let l = self.left[o..].iter().zip(&other.left[o..]);
        let r = self.right[o..].iter().zip(&other.right[o..]);
        l.chain(r).fold(T::zero(), |m, (a, b)| m.max(a.distance(b)))
    }

    /// Output rows `(t, x, is_left_limit)`: two rows at impulse nodes (left
    /// limit first), one elsewhere.
    pub fn rows(&self) -> Vec<(T, &SpectralVector<T>, bool)> {
        let mut out = Vec::with_capacity(self.grid.len() + self.jumps.len());
        let mut jumps = self.jumps.iter().peekable();
        for g in 0..self.grid.len() {
            let t = self.grid.time(g);
            if jumps.peek().is_some_and(|j| j.node == g) {
                jumps.next();
                out.push((t, &self.left[g], true));
                out.push((t, &self.right[g], false));
            } else {
                out.push((t, &self.left[g], false));
            }
        }
        out
    }
}
