//! Uniform spatial grids and the trapezoidal weights used on them.

use crate::error::{Result, SpectralError};

/// Uniform grid on `[x_min, x_max]` with `n_points` nodes, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(SpectralError::InvalidGrid("non-finite bounds".into()));
        }
        if x_min >= x_max {
            return Err(SpectralError::InvalidGrid(format!(
                "x_min = {x_min} must be below x_max = {x_max}"
            )));
        }
        if n_points < 3 {
            return Err(SpectralError::InvalidGrid(format!(
                "need at least 3 points, got {n_points}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node spacing.
    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Index of the node closest to `x` (clamped to the grid).
    pub fn nearest(&self, x: f64) -> usize {
        let t = ((x - self.x_min) / self.step()).round();
        t.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Trapezoidal quadrature weights.
    pub fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.n_points, self.step())
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_points {
            return Err(SpectralError::GridMismatch {
                expected: self.n_points,
                actual: len,
            });
        }
        Ok(())
    }
}

/// Trapezoidal weights for `n` uniformly spaced nodes with spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if let Some(first) = w.first_mut() {
        *first = 0.5 * h;
    }
    if let Some(last) = w.last_mut() {
        *last = 0.5 * h;
    }
    w
}
