//! Split-operator time evolution.
//!
//! One step is a second-order Strang split: half a kinetic step applied
//! spectrally, the full potential phase sampled at the step midpoint, then
//! the second kinetic half. Every factor is a pointwise phase in its own
//! diagonal basis, so each step is unitary up to FFT rounding and the norm is
//! never renormalized behind the caller's back.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{transpose_square, FftPair};
use crate::grid::Grid;
use crate::potential::{ControlLaw, ControlledHarmonic, HarmonicPotential, Potential, Potential2};
use crate::state::{WaveFunction, WaveFunction2};
use crate::trajectory::Trajectory;

/// Step size, horizon, and recording cadence of one evolution.
#[derive(Clone, Copy, Debug)]
pub struct EvolutionSpec {
    dt: f64,
    t_final: f64,
    record_every: usize,
}

impl EvolutionSpec {
    /// `t_final` must be a whole number of steps; `t_final = 0` is allowed
    /// and produces a single record of the unchanged state.
    pub fn new(dt: f64, t_final: f64, record_every: usize) -> Result<Self> {
        if dt <= 0.0 || !dt.is_finite() {
            return Err(Error::InvalidSpec(format!("dt must be positive, got {dt}")));
        }
        if t_final < 0.0 || !t_final.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "t_final must be non-negative, got {t_final}"
            )));
        }
        if record_every == 0 {
            return Err(Error::InvalidSpec("record_every must be >= 1".into()));
        }
        if t_final > 0.0 {
            if dt > t_final * (1.0 + 1e-12) {
                return Err(Error::InvalidSpec(format!(
                    "dt ({dt}) exceeds t_final ({t_final})"
                )));
            }
            let steps = (t_final / dt).round();
            if steps < 1.0 || (steps * dt - t_final).abs() > 1e-9 * t_final.max(1.0) {
                return Err(Error::InvalidSpec(format!(
                    "t_final ({t_final}) is not a whole number of steps of dt ({dt})"
                )));
            }
        }
        Ok(Self {
            dt,
            t_final,
            record_every,
        })
    }

    /// Splits the horizon into `steps` equal steps.
    pub fn with_steps(t_final: f64, steps: usize, record_every: usize) -> Result<Self> {
        if steps == 0 || t_final <= 0.0 || !t_final.is_finite() {
            return Err(Error::InvalidSpec(
                "with_steps needs steps >= 1 and t_final > 0".into(),
            ));
        }
        Self::new(t_final / steps as f64, t_final, record_every)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn record_every(&self) -> usize {
        self.record_every
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// Guards the step size against the fastest frequency in play:
    /// `dt * omega_max < 0.1`.
    pub fn check_resolution(&self, omega_max: f64) -> Result<()> {
        if self.dt * omega_max >= 0.1 {
            return Err(Error::InvalidSpec(format!(
                "dt {} under-resolves omega_max {} (dt * omega_max = {} >= 0.1)",
                self.dt,
                omega_max,
                self.dt * omega_max
            )));
        }
        Ok(())
    }
}

/// Cached 1D split-operator stepper for a fixed grid and step size.
pub struct Stepper {
    grid: Grid,
    fft: FftPair,
    half_kinetic: Vec<Complex64>,
    dt: f64,
}

impl Stepper {
    pub fn new(grid: &Grid, dt: f64) -> Self {
        let half_kinetic = grid
            .wavenumbers()
            .iter()
            .map(|&k| Complex64::from_polar(1.0, -0.5 * k * k * 0.5 * dt))
            .collect();
        Self {
            grid: grid.clone(),
            fft: FftPair::new(grid.len()),
            half_kinetic,
            dt,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances the state from `t` to `t + dt` in place.
    pub fn step<P: Potential + ?Sized>(&mut self, wf: &mut WaveFunction, potential: &P, t: f64) {
        debug_assert_eq!(wf.grid(), &self.grid);
        self.step_amplitudes(wf.amplitudes_mut(), potential, t);
    }

    pub(crate) fn step_amplitudes<P: Potential + ?Sized>(
        &mut self,
        amps: &mut [Complex64],
        potential: &P,
        t: f64,
    ) {
        self.fft.forward(amps);
        for (a, &ph) in amps.iter_mut().zip(&self.half_kinetic) {
            *a *= ph;
        }
        self.fft.inverse(amps);
        let t_mid = t + 0.5 * self.dt;
        for (i, a) in amps.iter_mut().enumerate() {
            let v = potential.eval(self.grid.x(i), t_mid);
            *a *= Complex64::from_polar(1.0, -v * self.dt);
        }
        self.fft.forward(amps);
        for (a, &ph) in amps.iter_mut().zip(&self.half_kinetic) {
            *a *= ph;
        }
        self.fft.inverse(amps);
    }
}

/// One Strang step as a standalone operation.
pub fn step<P: Potential + ?Sized>(
    wf: &WaveFunction,
    potential: &P,
    t: f64,
    dt: f64,
) -> WaveFunction {
    let mut out = wf.clone();
    Stepper::new(wf.grid(), dt).step(&mut out, potential, t);
    out
}

fn check_boundary(grid: &Grid, mean: f64, spread: f64, t: f64) -> Result<()> {
    if mean - 4.0 * spread < grid.x_min() || mean + 4.0 * spread > grid.x_max() {
        return Err(Error::BoundaryViolation { t });
    }
    Ok(())
}

fn evolve_impl<P: Potential + ?Sized>(
    wf: &WaveFunction,
    potential: &P,
    spec: &EvolutionSpec,
    law: Option<&ControlLaw>,
    mut hook: Option<&mut dyn FnMut(&mut WaveFunction, f64)>,
) -> Result<(WaveFunction, Trajectory)> {
    let mut state = wf.clone();
    let mut stepper = Stepper::new(wf.grid(), spec.dt());
    let steps = spec.steps();
    let mut traj = Trajectory::new();
    traj.time_dependent = potential.time_dependent();

    let mut cost = 0.0;
    let mut prev_record: Option<(f64, f64)> = None; // (t, <F_c^2>)
    let mut record = |state: &WaveFunction, t: f64, traj: &mut Trajectory| -> Result<()> {
        let mean = state.mean_position();
        let spread = state.spread();
        check_boundary(state.grid(), mean, spread, t)?;
        traj.times.push(t);
        traj.mean_x.push(mean);
        traj.spread.push(spread);
        traj.norm.push(state.norm());
        traj.energy.push(state.energy(potential, t));
        if let Some(law) = law {
            let second = spread * spread + mean * mean;
            let fsq = law.expected_force_sq(mean, second, t);
            if let Some((t0, fsq0)) = prev_record {
                cost += 0.5 * (fsq0 + fsq) * (t - t0);
            }
            prev_record = Some((t, fsq));
            traj.force_expect.push(law.expected_force(mean, t));
            traj.cost_accum.push(cost);
        } else {
            traj.force_expect.push(0.0);
            traj.cost_accum.push(0.0);
        }
        Ok(())
    };

    record(&state, 0.0, &mut traj)?;
    for i in 1..=steps {
        let t_prev = (i - 1) as f64 * spec.dt();
        stepper.step(&mut state, potential, t_prev);
        let t = i as f64 * spec.dt();
        if i % spec.record_every() == 0 || i == steps {
            record(&state, t, &mut traj)?;
        }
        if let Some(h) = hook.as_deref_mut() {
            h(&mut state, t);
        }
    }
    Ok((state, traj))
}

/// Repeated stepping with observables recorded every `record_every` steps
/// (plus the initial and final states).
///
/// The optional `hook` runs after each step, once that step's record (if
/// any) has been taken. Aborts if the packet comes within four standard
/// deviations of the periodic boundary.
pub fn evolve<P: Potential + ?Sized>(
    wf: &WaveFunction,
    potential: &P,
    spec: &EvolutionSpec,
    hook: Option<&mut dyn FnMut(&mut WaveFunction, f64)>,
) -> Result<(WaveFunction, Trajectory)> {
    evolve_impl(wf, potential, spec, None, hook)
}

/// [`evolve`] under an oscillator plus control law, additionally recording
/// the expected control force and the accumulated cost
/// `integral of <F_c^2>` (trapezoidal, at record resolution).
pub fn evolve_controlled(
    wf: &WaveFunction,
    harmonic: &HarmonicPotential,
    law: &ControlLaw,
    spec: &EvolutionSpec,
) -> Result<(WaveFunction, Trajectory)> {
    let controlled = ControlledHarmonic::new(*harmonic, law.clone());
    evolve_impl(wf, &controlled, spec, Some(law), None)
}

/// Cached 2D split-operator stepper.
pub struct Stepper2 {
    grid: Grid,
    fft: FftPair,
    /// Laid out `[m2 * n + m1]`, matching the row/column transform order.
    half_kinetic: Vec<Complex64>,
    dt: f64,
}

impl Stepper2 {
    pub fn new(grid: &Grid, dt: f64) -> Self {
        let n = grid.len();
        let k = grid.wavenumbers();
        let mut half_kinetic = Vec::with_capacity(n * n);
        for m2 in 0..n {
            for m1 in 0..n {
                let ksq = k[m1] * k[m1] + k[m2] * k[m2];
                half_kinetic.push(Complex64::from_polar(1.0, -0.5 * ksq * 0.5 * dt));
            }
        }
        Self {
            grid: grid.clone(),
            fft: FftPair::new(n),
            half_kinetic,
            dt,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn half_kinetic(&mut self, amps: &mut [Complex64]) {
        let n = self.grid.len();
        // Rows transform i2 -> m2, transpose, rows transform i1 -> m1,
        // leaving the layout [m2 * n + m1].
        self.fft.forward_rows(amps);
        transpose_square(amps, n);
        self.fft.forward_rows(amps);
        for (a, &ph) in amps.iter_mut().zip(&self.half_kinetic) {
            *a *= ph;
        }
        self.fft.inverse_rows(amps);
        transpose_square(amps, n);
        self.fft.inverse_rows(amps);
    }

    /// Advances the state from `t` to `t + dt` in place.
    pub fn step<P: Potential2 + ?Sized>(&mut self, wf: &mut WaveFunction2, potential: &P, t: f64) {
        debug_assert_eq!(wf.grid(), &self.grid);
        let n = self.grid.len();
        let dt = self.dt;
        let t_mid = t + 0.5 * dt;
        let amps = wf.amplitudes_mut();
        self.half_kinetic(amps);
        for i1 in 0..n {
            let x1 = self.grid.x(i1);
            for i2 in 0..n {
                let v = potential.eval(x1, self.grid.x(i2), t_mid);
                amps[i1 * n + i2] *= Complex64::from_polar(1.0, -v * dt);
            }
        }
        self.half_kinetic(amps);
    }
}

/// 2D analogue of [`evolve`], recording both means, the `x1` spread, and the
/// position covariance.
pub fn evolve2<P: Potential2 + ?Sized>(
    wf: &WaveFunction2,
    potential: &P,
    spec: &EvolutionSpec,
) -> Result<(WaveFunction2, Trajectory)> {
    let mut state = wf.clone();
    let mut stepper = Stepper2::new(wf.grid(), spec.dt());
    let steps = spec.steps();
    let mut traj = Trajectory::new();
    traj.time_dependent = potential.time_dependent();

    let record = |state: &WaveFunction2, t: f64, traj: &mut Trajectory| -> Result<()> {
        let m1 = state.mean_x1();
        let m2 = state.mean_x2();
        let s1 = state.spread_x1();
        check_boundary(state.grid(), m1, s1, t)?;
        check_boundary(state.grid(), m2, s1, t)?;
        traj.times.push(t);
        traj.mean_x.push(m1);
        traj.mean_x2.push(m2);
        traj.spread.push(s1);
        traj.norm.push(state.norm());
        traj.energy.push(state.energy(potential, t));
        traj.covariance.push(state.covariance());
        traj.force_expect.push(0.0);
        traj.cost_accum.push(0.0);
        Ok(())
    };

    record(&state, 0.0, &mut traj)?;
    for i in 1..=steps {
        let t_prev = (i - 1) as f64 * spec.dt();
        stepper.step(&mut state, potential, t_prev);
        if i % spec.record_every() == 0 || i == steps {
            record(&state, i as f64 * spec.dt(), &mut traj)?;
        }
    }
    Ok((state, traj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::HarmonicPotential;
    use crate::state::{fidelity, GaussianState};
    use approx::assert_abs_diff_eq;

    fn grid() -> Grid {
        Grid::new(-20.0, 20.0, 1024).unwrap()
    }

    fn ground_state(g: &Grid) -> WaveFunction {
        let gs = GaussianState::new(0.0, GaussianState::ground_state_width(1.0)).unwrap();
        WaveFunction::gaussian(g, &gs).unwrap()
    }

    #[test]
    fn eigenstate_only_picks_up_a_global_phase() {
        let g = grid();
        let wf = ground_state(&g);
        let v = HarmonicPotential::new(1.0).unwrap();
        let stepped = step(&wf, &v, 0.0, 0.01);
        assert!(fidelity(&wf, &stepped).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn single_step_preserves_norm() {
        let g = grid();
        let gs = GaussianState::new(1.5, 0.6).unwrap().with_momentum(2.0);
        let wf = WaveFunction::gaussian(&g, &gs).unwrap();
        let v = HarmonicPotential::new(1.0).unwrap();
        let stepped = step(&wf, &v, 0.0, 0.005);
        assert!((stepped.norm() - wf.norm()).abs() < 1e-12);
    }

    #[test]
    fn displaced_packet_flips_after_half_period() {
        let g = grid();
        let gs = GaussianState::new(1.0, GaussianState::ground_state_width(1.0)).unwrap();
        let wf = WaveFunction::gaussian(&g, &gs).unwrap();
        let v = HarmonicPotential::new(1.0).unwrap();
        let spec = EvolutionSpec::with_steps(std::f64::consts::PI, 1000, 8).unwrap();
        let (final_state, _) = evolve(&wf, &v, &spec, None).unwrap();
        assert_abs_diff_eq!(final_state.mean_position(), -1.0, epsilon = 1e-4);
    }

    #[test]
    fn zero_horizon_records_once_and_leaves_state_alone() {
        let g = grid();
        let wf = ground_state(&g);
        let v = HarmonicPotential::new(1.0).unwrap();
        let spec = EvolutionSpec::new(0.01, 0.0, 8).unwrap();
        let (out, traj) = evolve(&wf, &v, &spec, None).unwrap();
        assert_eq!(traj.len(), 1);
        assert!(fidelity(&wf, &out).unwrap() > 1.0 - 1e-14);
    }

    #[test]
    fn free_harmonic_mean_tracks_cosine() {
        let g = grid();
        let gs = GaussianState::new(1.0, GaussianState::ground_state_width(1.0)).unwrap();
        let wf = WaveFunction::gaussian(&g, &gs).unwrap();
        let v = HarmonicPotential::new(1.0).unwrap();
        let spec = EvolutionSpec::with_steps(5.0, 4096, 8).unwrap();
        let (_, traj) = evolve(&wf, &v, &spec, None).unwrap();
        for (t, m) in traj.times.iter().zip(&traj.mean_x) {
            assert_abs_diff_eq!(*m, t.cos(), epsilon = 1e-4);
        }
    }

    #[test]
    fn boundary_proximity_aborts_with_time() {
        let g = Grid::new(-6.0, 6.0, 256).unwrap();
        // Fast packet headed straight for the wall.
        let gs = GaussianState::new(0.0, 0.5).unwrap().with_momentum(6.0);
        let wf = WaveFunction::gaussian(&g, &gs).unwrap();
        let free = |_x: f64, _t: f64| 0.0;
        let spec = EvolutionSpec::with_steps(2.0, 2000, 4).unwrap();
        let err = evolve(&wf, &free, &spec, None).unwrap_err();
        assert!(matches!(err, Error::BoundaryViolation { t } if t > 0.0));
    }

    #[test]
    fn spec_validation() {
        assert!(EvolutionSpec::new(0.0, 1.0, 1).is_err());
        assert!(EvolutionSpec::new(0.3, 1.0, 1).is_err()); // not a whole step count
        assert!(EvolutionSpec::new(0.25, 1.0, 0).is_err());
        assert!(EvolutionSpec::new(2.0, 1.0, 1).is_err());
        let spec = EvolutionSpec::new(0.25, 1.0, 2).unwrap();
        assert_eq!(spec.steps(), 4);
        assert!(spec.check_resolution(0.1).is_ok());
        assert!(spec.check_resolution(1000.0).is_err());
    }

    #[test]
    fn hook_runs_between_steps() {
        let g = grid();
        let wf = ground_state(&g);
        let v = HarmonicPotential::new(1.0).unwrap();
        let spec = EvolutionSpec::with_steps(0.1, 10, 2).unwrap();
        let mut calls = 0usize;
        let mut hook = |_: &mut WaveFunction, _: f64| calls += 1;
        evolve(&wf, &v, &spec, Some(&mut hook)).unwrap();
        assert_eq!(calls, 10);
    }
}
