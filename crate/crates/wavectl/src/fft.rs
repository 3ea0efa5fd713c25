//! Thin wrapper around rustfft with the normalization convention used
//! throughout the crate: `inverse(forward(x)) == x`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct FftPair {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    n: usize,
}

impl FftPair {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Self {
            fwd,
            inv,
            scratch: vec![Complex64::default(); scratch_len],
            n,
        }
    }

    /// Unnormalized forward transform, in place.
    pub fn forward(&mut self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.fwd.process_with_scratch(buf, &mut self.scratch);
    }

    /// Inverse transform including the 1/n factor, in place.
    pub fn inverse(&mut self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.inv.process_with_scratch(buf, &mut self.scratch);
        let scale = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }

    /// Forward transform applied to each row of a row-major square matrix.
    pub fn forward_rows(&mut self, buf: &mut [Complex64]) {
        for row in buf.chunks_mut(self.n) {
            self.forward(row);
        }
    }

    /// Inverse transform applied to each row, including the 1/n factor.
    pub fn inverse_rows(&mut self, buf: &mut [Complex64]) {
        for row in buf.chunks_mut(self.n) {
            self.inverse(row);
        }
    }
}

/// In-place transpose of a square row-major matrix.
pub(crate) fn transpose_square(buf: &mut [Complex64], n: usize) {
    debug_assert_eq!(buf.len(), n * n);
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}
