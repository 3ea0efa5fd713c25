//! Uniform spatial grid with periodic topology.
//!
//! All states in this crate live on a [`Grid`]: `n` equally spaced points
//! covering `[x_min, x_max)`. The right endpoint is excluded because spectral
//! propagation treats the domain as periodic, so `x_max` is identified with
//! `x_min`. `n` must be a power of two to keep the FFT path fast and simple.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform 1D grid, shared by both axes of 2D states.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    /// Builds a grid over `[x_min, x_max)` with `n` points.
    ///
    /// Rejects inverted or empty bounds, non-finite bounds, and any `n` that
    /// is not a power of two at least 16.
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "bounds must be finite, got [{x_min}, {x_max}]"
            )));
        }
        if x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "empty domain: x_max ({x_max}) must exceed x_min ({x_min})"
            )));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 16, got {n}"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    /// Symmetric grid over `[-half_width, half_width)`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `(x_max - x_min) / n`.
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    /// Position of point `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    /// Iterator over all grid positions.
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Angular wavenumbers in FFT ordering: non-negative frequencies first,
    /// then negative ones.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let length = self.x_max - self.x_min;
        let base = 2.0 * PI / length;
        (0..self.n)
            .map(|m| {
                let signed = if m <= self.n / 2 - 1 {
                    m as isize
                } else {
                    m as isize - self.n as isize
                };
                base * signed as f64
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_matches_definition() {
        let g = Grid::new(-20.0, 20.0, 1024).unwrap();
        assert_eq!(g.dx(), 40.0 / 1024.0);
        let g = Grid::new(-1.0, 1.0, 16).unwrap();
        assert_eq!(g.dx(), 0.125);
    }

    #[test]
    fn rejects_empty_domain() {
        assert!(matches!(
            Grid::new(0.0, 0.0, 64),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            Grid::new(1.0, -1.0, 64),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn rejects_bad_point_counts() {
        assert!(Grid::new(-1.0, 1.0, 48).is_err());
        assert!(Grid::new(-1.0, 1.0, 8).is_err());
        assert!(Grid::new(-1.0, 1.0, 17).is_err());
    }

    #[test]
    fn wavenumbers_are_fft_ordered() {
        let g = Grid::new(-1.0, 1.0, 16).unwrap();
        let k = g.wavenumbers();
        assert_eq!(k[0], 0.0);
        assert!(k[1] > 0.0);
        assert!(k[8] < 0.0);
        // Nyquist bucket is the most negative frequency.
        assert_eq!(k[8], -8.0 * PI);
        assert_eq!(k[15], -k[1]);
    }

    #[test]
    fn points_cover_half_open_interval() {
        let g = Grid::new(-2.0, 2.0, 16).unwrap();
        assert_eq!(g.x(0), -2.0);
        let last = g.x(15);
        assert!(last < 2.0);
        assert!((last - (2.0 - g.dx())).abs() < 1e-15);
    }
}
