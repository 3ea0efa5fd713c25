//! Numerical stability criteria: energy constancy for autonomous control
//! and Lyapunov-descent checking for time-dependent control.

use crate::error::{Error, Result};
use crate::trajectory::{Observables, Trajectory};

/// Absolute tolerance on the finite-difference Lyapunov derivative; below
/// trajectory discretization noise at default resolutions.
pub const DERIVATIVE_TOL: f64 = 1e-6;

/// Energy drift of a recorded run.
#[derive(Clone, Copy, Debug)]
pub struct EnergyDriftReport {
    /// `max_t |E(t) - E(0)|`.
    pub max_abs: f64,
    /// `max_abs / |E(0)|`, absent when the initial energy is (near) zero.
    pub relative: Option<f64>,
    /// False when the potential was explicitly time-dependent: the drift is
    /// still reported, but constancy is not a meaningful criterion there.
    pub applicable: bool,
}

/// Measures energy constancy over a trajectory.
pub fn energy_drift(traj: &Trajectory) -> Result<EnergyDriftReport> {
    if traj.energy.len() != traj.times.len() || traj.energy.is_empty() {
        return Err(Error::Analysis(
            "trajectory has no energy channel".into(),
        ));
    }
    let e0 = traj.energy[0];
    let max_abs = traj
        .energy
        .iter()
        .map(|e| (e - e0).abs())
        .fold(0.0, f64::max);
    let relative = if e0.abs() > 1e-12 {
        Some(max_abs / e0.abs())
    } else {
        None
    };
    Ok(EnergyDriftReport {
        max_abs,
        relative,
        applicable: !traj.time_dependent,
    })
}

/// A candidate Lyapunov function over recorded observables, its region of
/// validity in mean position, and the equilibrium where it vanishes.
pub struct LyapunovSpec<F: Fn(&Observables, f64) -> f64> {
    candidate: F,
    region: (f64, f64),
    equilibrium: f64,
}

impl<F: Fn(&Observables, f64) -> f64> LyapunovSpec<F> {
    /// The candidate must vanish (within 1e-9) on the supplied equilibrium
    /// observables, and the equilibrium must lie inside the region.
    pub fn new(
        candidate: F,
        region: (f64, f64),
        equilibrium: f64,
        equilibrium_sample: &Observables,
    ) -> Result<Self> {
        if region.1 <= region.0 {
            return Err(Error::InvalidLyapunov(format!(
                "empty region [{}, {}]",
                region.0, region.1
            )));
        }
        if equilibrium < region.0 || equilibrium > region.1 {
            return Err(Error::InvalidLyapunov(
                "equilibrium lies outside the region".into(),
            ));
        }
        let at_eq = candidate(equilibrium_sample, 0.0);
        if at_eq.is_nan() || at_eq.abs() > 1e-9 {
            return Err(Error::InvalidLyapunov(format!(
                "candidate is {at_eq} at the equilibrium sample, expected 0"
            )));
        }
        Ok(Self {
            candidate,
            region,
            equilibrium,
        })
    }

    pub fn equilibrium(&self) -> f64 {
        self.equilibrium
    }
}

/// Verdict of checking a candidate along one trajectory.
///
/// Convexity of the candidate over the region is not verified; only descent
/// and region containment are.
#[derive(Clone, Copy, Debug)]
pub struct LyapunovReport {
    /// Largest finite-difference derivative observed inside the region.
    pub max_derivative: f64,
    /// Steps whose derivative exceeded [`DERIVATIVE_TOL`].
    pub violations: usize,
    pub violation_fraction: f64,
    /// Whether the mean position stayed inside the region for the whole run.
    pub stayed_in_region: bool,
    /// First time the mean position left the region; the criterion is not
    /// applied past this point.
    pub exit_time: Option<f64>,
    /// Number of finite-difference intervals actually checked.
    pub intervals_checked: usize,
}

impl LyapunovReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.stayed_in_region
    }
}

/// Evaluates the candidate along the trajectory and checks its
/// finite-difference time derivative for positivity beyond tolerance.
///
/// The trajectory must be recorded densely enough that the finite
/// difference is meaningful (records much closer than the system period).
pub fn lyapunov_verify<F: Fn(&Observables, f64) -> f64>(
    spec: &LyapunovSpec<F>,
    traj: &Trajectory,
) -> Result<LyapunovReport> {
    if traj.len() < 2 {
        return Err(Error::Analysis(
            "lyapunov check needs at least two records".into(),
        ));
    }
    let mut report = LyapunovReport {
        max_derivative: f64::NEG_INFINITY,
        violations: 0,
        violation_fraction: 0.0,
        stayed_in_region: true,
        exit_time: None,
        intervals_checked: 0,
    };
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..traj.len() {
        let obs = traj.observables(i);
        let t = traj.times[i];
        if obs.mean_x < spec.region.0 || obs.mean_x > spec.region.1 {
            report.stayed_in_region = false;
            report.exit_time = Some(t);
            break;
        }
        let value = (spec.candidate)(&obs, t);
        if !value.is_finite() {
            return Err(Error::InvalidLyapunov(format!(
                "candidate produced a non-finite value at t = {t}; \
                 the trajectory may lack a channel it uses"
            )));
        }
        if let Some((t0, v0)) = prev {
            let derivative = (value - v0) / (t - t0);
            report.intervals_checked += 1;
            report.max_derivative = report.max_derivative.max(derivative);
            if derivative > DERIVATIVE_TOL {
                report.violations += 1;
            }
        }
        prev = Some((t, value));
    }
    if report.intervals_checked > 0 {
        report.violation_fraction = report.violations as f64 / report.intervals_checked as f64;
    }
    Ok(report)
}
