//! Wave-function states on a grid and the observables extracted from them.
//!
//! A [`WaveFunction`] stores complex amplitudes, one per grid point, with the
//! normalization convention `sum |psi_i|^2 dx = 1`. Constructors renormalize
//! exactly once; evolution never renormalizes, so any later drift of
//! [`WaveFunction::norm`] away from 1 is a measurable diagnostic rather than
//! something silently patched over.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{transpose_square, FftPair};
use crate::grid::Grid;
use crate::potential::{CoupledPotential, Potential, Potential2};

/// Analytic gaussian packet parameters.
///
/// The sampled profile is `(2 pi sigma^2)^(-1/4) exp(-(x-center)^2/(4 sigma^2))`
/// times a plane-wave factor `exp(i (momentum x + phase))`, so `center` is the
/// mean position and `spread` the standard deviation of the density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianState {
    pub center: f64,
    pub spread: f64,
    pub momentum: f64,
    pub phase: f64,
}

impl GaussianState {
    /// Packet at rest with the given center and spread.
    pub fn new(center: f64, spread: f64) -> Result<Self> {
        if spread <= 0.0 || !spread.is_finite() || !center.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "gaussian parameters must be finite with spread > 0, got center {center}, spread {spread}"
            )));
        }
        Ok(Self {
            center,
            spread,
            momentum: 0.0,
            phase: 0.0,
        })
    }

    pub fn with_momentum(mut self, momentum: f64) -> Self {
        self.momentum = momentum;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    /// Width of the harmonic ground state, `1/sqrt(2 omega)` (hbar = m = 1).
    pub fn ground_state_width(omega: f64) -> f64 {
        1.0 / (2.0 * omega).sqrt()
    }
}

/// Complex amplitudes on a 1D grid.
#[derive(Clone, Debug)]
pub struct WaveFunction {
    grid: Grid,
    amplitudes: Vec<Complex64>,
}

impl WaveFunction {
    /// Samples a gaussian packet and renormalizes it to exactly 1 on the grid.
    ///
    /// Rejects packets whose 6-sigma support leaves the domain: the periodic
    /// boundary would wrap the tail around and corrupt every later observable.
    pub fn gaussian(grid: &Grid, state: &GaussianState) -> Result<Self> {
        let lo = state.center - 6.0 * state.spread;
        let hi = state.center + 6.0 * state.spread;
        if lo < grid.x_min() || hi > grid.x_max() {
            return Err(Error::PacketOutsideDomain {
                center: state.center,
                spread: state.spread,
                lo,
                hi,
                x_min: grid.x_min(),
                x_max: grid.x_max(),
            });
        }
        let norm_const = (2.0 * std::f64::consts::PI * state.spread * state.spread).powf(-0.25);
        let amplitudes = grid
            .points()
            .map(|x| {
                let arg = x - state.center;
                let envelope = norm_const * (-arg * arg / (4.0 * state.spread * state.spread)).exp();
                let angle = state.momentum * x + state.phase;
                Complex64::from_polar(envelope, angle)
            })
            .collect();
        let mut wf = Self {
            grid: grid.clone(),
            amplitudes,
        };
        wf.renormalize();
        Ok(wf)
    }

    /// Wraps raw amplitudes without renormalizing.
    pub fn from_amplitudes(grid: Grid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "amplitude count {} does not match grid size {}",
                amplitudes.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    /// Normalized superposition `a |lhs> + b |rhs>`.
    pub fn superpose(a: Complex64, lhs: &Self, b: Complex64, rhs: &Self) -> Result<Self> {
        if lhs.grid != rhs.grid {
            return Err(Error::GridMismatch);
        }
        let amplitudes: Vec<Complex64> = lhs
            .amplitudes
            .iter()
            .zip(&rhs.amplitudes)
            .map(|(&u, &v)| a * u + b * v)
            .collect();
        let mut wf = Self {
            grid: lhs.grid.clone(),
            amplitudes,
        };
        let n = wf.norm();
        if n < 1e-12 {
            return Err(Error::InvalidGrid(
                "superposition has vanishing norm".to_string(),
            ));
        }
        wf.renormalize();
        Ok(wf)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    fn renormalize(&mut self) {
        let n = self.norm();
        let scale = 1.0 / n;
        for a in &mut self.amplitudes {
            *a *= scale;
        }
    }

    /// `sqrt(sum |psi_i|^2 dx)`.
    pub fn norm(&self) -> f64 {
        let dx = self.grid.dx();
        (self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx).sqrt()
    }

    /// `<x> = sum x_i |psi_i|^2 dx`.
    pub fn mean_position(&self) -> f64 {
        let dx = self.grid.dx();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| self.grid.x(i) * a.norm_sqr())
            .sum::<f64>()
            * dx
    }

    /// `<x^2>`.
    pub fn second_moment(&self) -> f64 {
        let dx = self.grid.dx();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let x = self.grid.x(i);
                x * x * a.norm_sqr()
            })
            .sum::<f64>()
            * dx
    }

    /// Standard deviation `sqrt(<x^2> - <x>^2)`.
    pub fn spread(&self) -> f64 {
        let mean = self.mean_position();
        (self.second_moment() - mean * mean).max(0.0).sqrt()
    }

    /// Excess kurtosis of the position density; zero for a gaussian packet.
    pub fn excess_kurtosis(&self) -> f64 {
        let dx = self.grid.dx();
        let mean = self.mean_position();
        let mut m2 = 0.0;
        let mut m4 = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let d = self.grid.x(i) - mean;
            let w = a.norm_sqr() * dx;
            m2 += d * d * w;
            m4 += d * d * d * d * w;
        }
        m4 / (m2 * m2) - 3.0
    }

    /// Total energy `<T> + <V(., t)>` with the kinetic term evaluated
    /// spectrally (hbar = m = 1).
    pub fn energy<P: Potential + ?Sized>(&self, potential: &P, t: f64) -> f64 {
        let dx = self.grid.dx();
        let potential_term: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| potential.eval(self.grid.x(i), t) * a.norm_sqr())
            .sum::<f64>()
            * dx;
        potential_term + self.kinetic_energy()
    }

    /// `<T>` alone.
    pub fn kinetic_energy(&self) -> f64 {
        let n = self.grid.len();
        let mut fft = FftPair::new(n);
        let mut buf = self.amplitudes.clone();
        fft.forward(&mut buf);
        let k = self.grid.wavenumbers();
        let sum: f64 = buf
            .iter()
            .zip(&k)
            .map(|(c, &k)| 0.5 * k * k * c.norm_sqr())
            .sum();
        sum * self.grid.dx() / n as f64
    }
}

/// `|<a|b>|`, clamped only by floating-point rounding.
///
/// Both states must live on the same grid and be normalized.
pub fn fidelity(a: &WaveFunction, b: &WaveFunction) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let dx = a.grid.dx();
    let overlap: Complex64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(&u, &v)| u.conj() * v)
        .sum();
    Ok((overlap * dx).norm())
}

/// Complex amplitudes on a square 2D grid (same [`Grid`] along both axes),
/// stored row-major with index `i1 * n + i2`.
#[derive(Clone, Debug)]
pub struct WaveFunction2 {
    grid: Grid,
    amplitudes: Vec<Complex64>,
}

impl WaveFunction2 {
    /// Product of two independent 1D gaussians.
    pub fn product(grid: &Grid, first: &GaussianState, second: &GaussianState) -> Result<Self> {
        let a = WaveFunction::gaussian(grid, first)?;
        let b = WaveFunction::gaussian(grid, second)?;
        let n = grid.len();
        let mut amplitudes = vec![Complex64::default(); n * n];
        for i1 in 0..n {
            for i2 in 0..n {
                amplitudes[i1 * n + i2] = a.amplitudes[i1] * b.amplitudes[i2];
            }
        }
        let mut wf = Self {
            grid: grid.clone(),
            amplitudes,
        };
        wf.renormalize();
        Ok(wf)
    }

    /// Ground state of a coupled pair, built analytically in the rotated
    /// normal-mode coordinates rather than by any relaxation scheme.
    pub fn coupled_ground_state(grid: &Grid, coupled: &CoupledPotential) -> Result<Self> {
        Self::mode_displaced(grid, coupled, 0.0, 0.0)
    }

    /// Coupled ground state displaced by `d1` along the symmetric mode
    /// `y1 = (x1+x2)/sqrt(2)` and `d2` along the antisymmetric mode
    /// `y2 = (x1-x2)/sqrt(2)`.
    pub fn mode_displaced(
        grid: &Grid,
        coupled: &CoupledPotential,
        d1: f64,
        d2: f64,
    ) -> Result<Self> {
        let (freq_sum, freq_diff) = coupled.normal_modes();
        let sigma1 = GaussianState::ground_state_width(freq_sum);
        let sigma2 = GaussianState::ground_state_width(freq_diff);
        // Conservative support check mapped back to the x axes.
        let reach = ((d1.abs() + 6.0 * sigma1) + (d2.abs() + 6.0 * sigma2))
            / std::f64::consts::SQRT_2;
        if -reach < grid.x_min() || reach > grid.x_max() {
            return Err(Error::PacketOutsideDomain {
                center: (d1 + d2) / std::f64::consts::SQRT_2,
                spread: sigma1.max(sigma2),
                lo: -reach,
                hi: reach,
                x_min: grid.x_min(),
                x_max: grid.x_max(),
            });
        }
        let n = grid.len();
        let mut amplitudes = vec![Complex64::default(); n * n];
        let inv = 1.0 / std::f64::consts::SQRT_2;
        for i1 in 0..n {
            let x1 = grid.x(i1);
            for i2 in 0..n {
                let x2 = grid.x(i2);
                let y1 = (x1 + x2) * inv;
                let y2 = (x1 - x2) * inv;
                let e1 = -(y1 - d1) * (y1 - d1) / (4.0 * sigma1 * sigma1);
                let e2 = -(y2 - d2) * (y2 - d2) / (4.0 * sigma2 * sigma2);
                amplitudes[i1 * n + i2] = Complex64::new((e1 + e2).exp(), 0.0);
            }
        }
        let mut wf = Self {
            grid: grid.clone(),
            amplitudes,
        };
        wf.renormalize();
        Ok(wf)
    }

    pub fn from_amplitudes(grid: Grid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() * grid.len() {
            return Err(Error::InvalidGrid(format!(
                "amplitude count {} does not match grid size {}^2",
                amplitudes.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    fn renormalize(&mut self) {
        let n = self.norm();
        let scale = 1.0 / n;
        for a in &mut self.amplitudes {
            *a *= scale;
        }
    }

    pub fn norm(&self) -> f64 {
        let da = self.grid.dx() * self.grid.dx();
        (self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * da).sqrt()
    }

    fn moment<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        let n = self.grid.len();
        let da = self.grid.dx() * self.grid.dx();
        let mut sum = 0.0;
        for i1 in 0..n {
            let x1 = self.grid.x(i1);
            for i2 in 0..n {
                let x2 = self.grid.x(i2);
                sum += f(x1, x2) * self.amplitudes[i1 * n + i2].norm_sqr();
            }
        }
        sum * da
    }

    pub fn mean_x1(&self) -> f64 {
        self.moment(|x1, _| x1)
    }

    pub fn mean_x2(&self) -> f64 {
        self.moment(|_, x2| x2)
    }

    pub fn spread_x1(&self) -> f64 {
        let m = self.mean_x1();
        (self.moment(|x1, _| x1 * x1) - m * m).max(0.0).sqrt()
    }

    /// `<x1 x2> - <x1><x2>`.
    pub fn covariance(&self) -> f64 {
        self.moment(|x1, x2| x1 * x2) - self.mean_x1() * self.mean_x2()
    }

    /// Total energy under a 2D potential, kinetic term evaluated spectrally.
    pub fn energy<P: Potential2 + ?Sized>(&self, potential: &P, t: f64) -> f64 {
        let n = self.grid.len();
        let da = self.grid.dx() * self.grid.dx();
        let mut potential_term = 0.0;
        for i1 in 0..n {
            let x1 = self.grid.x(i1);
            for i2 in 0..n {
                let x2 = self.grid.x(i2);
                potential_term +=
                    potential.eval(x1, x2, t) * self.amplitudes[i1 * n + i2].norm_sqr();
            }
        }
        potential_term * da + self.kinetic_energy()
    }

    pub fn kinetic_energy(&self) -> f64 {
        let n = self.grid.len();
        let mut fft = FftPair::new(n);
        let mut buf = self.amplitudes.clone();
        fft.forward_rows(&mut buf);
        transpose_square(&mut buf, n);
        fft.forward_rows(&mut buf);
        // buf is now indexed [i2_freq * n + i1_freq].
        let k = self.grid.wavenumbers();
        let mut sum = 0.0;
        for m2 in 0..n {
            for m1 in 0..n {
                sum += 0.5 * (k[m1] * k[m1] + k[m2] * k[m2]) * buf[m2 * n + m1].norm_sqr();
            }
        }
        sum * self.grid.dx() * self.grid.dx() / (n * n) as f64
    }
}
