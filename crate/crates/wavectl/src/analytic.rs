//! Closed-form and ODE oracles for packet-center and width dynamics.
//!
//! For potentials at most quadratic in position the expectation values obey
//! the corresponding classical equations exactly, so these routines serve as
//! independent references for the grid propagator.

use crate::error::{Error, Result};
use crate::potential::{ControlLaw, HarmonicPotential, Profile};
use crate::propagate::EvolutionSpec;
use crate::quadrature;
use crate::trajectory::Trajectory;

/// Packet center at time `T` under `V = (omega^2 + k) x^2 / 2 - f(t) x`:
/// `p(T) = p0 cos(Omega T) + (1/Omega) integral_0^T f(t) sin(Omega (T-t)) dt`
/// with `Omega = sqrt(omega^2 + k)`.
///
/// The quadrature is evaluated to an absolute error below 1e-9.
pub fn analytic_center(p0: f64, omega: f64, k: f64, force: &Profile, t_final: f64) -> Result<f64> {
    let omega_sq = omega * omega + k;
    if omega_sq <= 0.0 {
        return Err(Error::UnboundMode { omega_sq });
    }
    let big_omega = omega_sq.sqrt();
    let driven = quadrature::integrate(
        |t| force.eval(t) * (big_omega * (t_final - t)).sin(),
        0.0,
        t_final,
        1e-11,
    );
    Ok(p0 * (big_omega * t_final).cos() + driven / big_omega)
}

/// Width of an initially real gaussian under a harmonic potential of
/// frequency `Omega`:
/// `sigma(t)^2 = sigma0^2 cos^2(Omega t) + sin^2(Omega t) / (4 sigma0^2 Omega^2)`.
///
/// Only valid for packets whose initial amplitude carries no position-
/// dependent phase; everything else is the grid's job.
pub fn analytic_spread(sigma0: f64, big_omega: f64, t: f64) -> f64 {
    let c = (big_omega * t).cos();
    let s = (big_omega * t).sin();
    (sigma0 * sigma0 * c * c + s * s / (4.0 * sigma0 * sigma0 * big_omega * big_omega)).sqrt()
}

/// One sample of the expectation-value ODE integration.
#[derive(Clone, Copy, Debug)]
pub struct EhrenfestSample {
    pub t: f64,
    pub mean: f64,
    pub velocity: f64,
}

fn acceleration(h: &HarmonicPotential, law: &ControlLaw, p: f64, t: f64) -> f64 {
    -(h.omega() * h.omega() + law.spring_total()) * p + law.uniform_total_force(t)
}

/// Integrates the exact expectation-value dynamics
/// `p'' = -(omega^2 + k + alpha) p + alpha p_ref(t) + f(t) + drive(t)`
/// with classic fourth-order Runge-Kutta at the spec's step size, returning
/// every step.
///
/// Valid because the potential is quadratic plus linear by construction;
/// the types admit nothing else.
pub fn ehrenfest_samples(
    p0: f64,
    v0: f64,
    h: &HarmonicPotential,
    law: &ControlLaw,
    spec: &EvolutionSpec,
) -> Vec<EhrenfestSample> {
    let dt = spec.dt();
    let steps = spec.steps();
    let mut out = Vec::with_capacity(steps + 1);
    let (mut p, mut v) = (p0, v0);
    out.push(EhrenfestSample {
        t: 0.0,
        mean: p,
        velocity: v,
    });
    for i in 0..steps {
        let t = i as f64 * dt;
        let (k1p, k1v) = (v, acceleration(h, law, p, t));
        let (k2p, k2v) = (
            v + 0.5 * dt * k1v,
            acceleration(h, law, p + 0.5 * dt * k1p, t + 0.5 * dt),
        );
        let (k3p, k3v) = (
            v + 0.5 * dt * k2v,
            acceleration(h, law, p + 0.5 * dt * k2p, t + 0.5 * dt),
        );
        let (k4p, k4v) = (v + dt * k3v, acceleration(h, law, p + dt * k3p, t + dt));
        p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        out.push(EhrenfestSample {
            t: (i + 1) as f64 * dt,
            mean: p,
            velocity: v,
        });
    }
    out
}

/// [`ehrenfest_samples`] repackaged as a mean-position-only [`Trajectory`]
/// at the spec's record cadence.
pub fn ehrenfest_path(
    p0: f64,
    v0: f64,
    h: &HarmonicPotential,
    law: &ControlLaw,
    spec: &EvolutionSpec,
) -> Trajectory {
    let samples = ehrenfest_samples(p0, v0, h, law, spec);
    let mut traj = Trajectory::new();
    traj.time_dependent = law.time_dependent();
    let last = samples.len() - 1;
    for (i, s) in samples.iter().enumerate() {
        if i == 0 || i % spec.record_every() == 0 || i == last {
            traj.times.push(s.t);
            traj.mean_x.push(s.mean);
        }
    }
    traj
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_force_center_is_a_cosine() {
        let p = analytic_center(1.0, 1.0, 0.0, &Profile::Zero, 5.0).unwrap();
        assert_abs_diff_eq!(p, 5.0f64.cos(), epsilon = 1e-12);
    }

    #[test]
    fn unbound_mode_is_rejected() {
        assert!(analytic_center(1.0, 1.0, -2.0, &Profile::Zero, 1.0).is_err());
    }

    #[test]
    fn spread_is_stationary_at_the_ground_width() {
        let sigma0 = 1.0 / (2.0f64).sqrt();
        for t in [0.0, 0.3, 1.7, 9.2] {
            assert_abs_diff_eq!(analytic_spread(sigma0, 1.0, t), sigma0, epsilon = 1e-12);
        }
        // And at t = 0 for any width.
        assert_abs_diff_eq!(analytic_spread(0.3, 2.0, 0.0), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn squeezed_packet_breathes() {
        let s = analytic_spread(0.3, 1.0, std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(s, 1.0 / 0.6, epsilon = 1e-12);
    }

    #[test]
    fn ehrenfest_matches_analytic_center_without_feedback() {
        let h = HarmonicPotential::new(1.0).unwrap();
        let force = Profile::closure(|t: f64| (2.0 * t).sin());
        let law = ControlLaw::free().with_force(force.clone());
        let spec = EvolutionSpec::with_steps(2.0, 4096, 8).unwrap();
        let samples = ehrenfest_samples(0.0, 0.0, &h, &law, &spec);
        let end = samples.last().unwrap();
        let expected = analytic_center(0.0, 1.0, 0.0, &force, 2.0).unwrap();
        assert_abs_diff_eq!(end.mean, expected, epsilon = 1e-7);
    }

    #[test]
    fn ehrenfest_free_oscillation_is_a_cosine_pointwise() {
        let h = HarmonicPotential::new(1.0).unwrap();
        let law = ControlLaw::free();
        let spec = EvolutionSpec::with_steps(6.0, 4096, 8).unwrap();
        for s in ehrenfest_samples(1.0, 0.0, &h, &law, &spec) {
            assert_abs_diff_eq!(s.mean, s.t.cos(), epsilon = 1e-7);
        }
    }
}
