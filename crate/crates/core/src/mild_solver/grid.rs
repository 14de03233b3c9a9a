use crate::error::{Error, Result};
use crate::scalar::{lit, Real};
use crate::spectral_model::ProblemSpec;

/// Uniform grid on `[-r, T]` with step `h = T / n`. Global node `g` sits at
/// `(g - m) h`, where `m = r / h` history steps precede the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T> {
    step: T,
    history: usize,
    forward: usize,
}

impl<T: Real> TimeGrid<T> {
    /// Grid with `round(T / dt)` forward steps; the delay must be a whole
    /// number of steps.
    pub fn new(horizon: T, delay: T, dt: T) -> Result<Self> {
        if !(dt > T::zero()) || !(horizon > T::zero()) {
            return Err(Error::Config(format!("step {dt} and horizon {horizon} must be positive")));
        }
        let forward = (horizon / dt).round().to_usize().unwrap_or(0).max(1);
        let step = horizon / T::from_count(forward);
        let history = whole_steps(delay, step)
            .ok_or_else(|| Error::Config(format!("delay {delay} is not a multiple of the step {step}")))?;
        Ok(Self {
            step,
            history,
            forward,
        })
    }

    /// Grid for `spec`; impulse times and nonlocal anchors must fall on nodes.
    pub fn for_spec(spec: &ProblemSpec<T>, dt: T) -> Result<Self> {
        let grid = Self::new(spec.horizon(), spec.delay(), dt)?;
        for imp in spec.impulses() {
            grid.forward_index(imp.time).ok_or_else(|| {
                Error::Config(format!("impulse time {} is not a grid node (step {})", imp.time, grid.step))
            })?;
        }
        for term in spec.nonlocal() {
            grid.forward_index(term.anchor).ok_or_else(|| {
                Error::Config(format!("nonlocal anchor {} is not a grid node (step {})", term.anchor, grid.step))
            })?;
        }
        Ok(grid)
    }

    pub fn step(&self) -> T {
        self.step
    }

    /// `m`: steps in `[-r, 0]`.
    pub fn history_steps(&self) -> usize {
        self.history
    }

    /// `n`: steps in `[0, T]`.
    pub fn forward_steps(&self) -> usize {
        self.forward
    }

    /// Number of nodes on `[-r, T]`.
    pub fn len(&self) -> usize {
        self.history + self.forward + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Global index of `t = 0`.
    pub fn origin(&self) -> usize {
        self.history
    }

    pub fn horizon(&self) -> T {
        self.step * T::from_count(self.forward)
    }

    pub fn delay(&self) -> T {
        self.step * T::from_count(self.history)
    }

    /// Time of global node `g`.
    pub fn time(&self, g: usize) -> T {
        if g >= self.history {
            self.step * T::from_count(g - self.history)
        } else {
            -(self.step * T::from_count(self.history - g))
        }
    }

    /// Time of forward node `i` (global `m + i`).
    pub fn forward_time(&self, i: usize) -> T {
        self.step * T::from_count(i)
    }

    /// Forward index of a node time in `[0, T]`.
    pub fn forward_index(&self, t: T) -> Option<usize> {
        if t < -self.tolerance() {
            return None;
        }
        whole_steps(t, self.step).filter(|&i| i <= self.forward)
    }

    /// Global index of a node time in `[-r, T]`.
    pub fn global_index(&self, t: T) -> Option<usize> {
        let shifted = t + self.delay();
        if shifted < -self.tolerance() {
            return None;
        }
        whole_steps(shifted.max(T::zero()), self.step).filter(|&g| g < self.len())
    }

    fn tolerance(&self) -> T {
        self.step * lit(1e-9)
    }
}

fn whole_steps<T: Real>(t: T, step: T) -> Option<usize> {
    let ratio = t / step;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= lit::<T>(1e-6).max(T::epsilon() * lit(64.0) * nearest.abs()) && nearest >= T::zero() {
        nearest.to_usize()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_and_alignment() {
        let g = TimeGrid::new(1.0_f64, 0.1, 1.0 / 200.0).unwrap();
        assert_eq!((g.history_steps(), g.forward_steps(), g.len()), (20, 200, 221));
        assert_eq!(g.time(0), -0.1);
        assert_eq!(g.time(20), 0.0);
        assert_eq!(g.forward_index(0.5), Some(100));
        assert_eq!(g.forward_index(0.5025), None);
        assert_eq!(g.global_index(-0.05), Some(10));
        assert!(TimeGrid::new(1.0_f64, 0.0123, 0.01).is_err());
    }
}
