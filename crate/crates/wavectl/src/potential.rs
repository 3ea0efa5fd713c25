//! Potentials: the bare oscillator, control-law modifications, programmed
//! two-branch potentials, and the coupled pair induced by cross forces.
//!
//! Potentials are immutable after construction and evaluation is pure, so
//! they can be shared freely across threads and evolutions.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A 1D potential `V(x, t)`.
pub trait Potential {
    fn eval(&self, x: f64, t: f64) -> f64;

    /// Whether `V` depends explicitly on `t`. Energy-constancy checks only
    /// apply to autonomous potentials.
    fn time_dependent(&self) -> bool {
        true
    }
}

impl<F: Fn(f64, f64) -> f64> Potential for F {
    fn eval(&self, x: f64, t: f64) -> f64 {
        self(x, t)
    }
}

/// A 2D potential `V(x1, x2, t)`.
pub trait Potential2 {
    fn eval(&self, x1: f64, x2: f64, t: f64) -> f64;

    fn time_dependent(&self) -> bool {
        true
    }
}

/// `V(x) = omega^2 x^2 / 2` (unit mass).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicPotential {
    omega: f64,
}

impl HarmonicPotential {
    pub fn new(omega: f64) -> Result<Self> {
        if omega <= 0.0 || !omega.is_finite() {
            return Err(Error::UnboundMode {
                omega_sq: omega * omega * omega.signum(),
            });
        }
        Ok(Self { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl Potential for HarmonicPotential {
    fn eval(&self, x: f64, _t: f64) -> f64 {
        0.5 * self.omega * self.omega * x * x
    }
    fn time_dependent(&self) -> bool {
        false
    }
}

/// Time profile for a spatially uniform force.
///
/// Profiles are continuous-time callables so that refining the step size
/// never requires re-synthesis; tabulated data is accepted and interpolated
/// linearly (held constant outside the table range).
#[derive(Clone)]
pub enum Profile {
    Zero,
    Closure(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    Table(Arc<[(f64, f64)]>),
}

impl Profile {
    pub fn closure(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Closure(Arc::new(f))
    }

    /// Tabulated profile; sample times must be strictly increasing.
    pub fn table(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidControlLaw(
                "tabulated profile needs at least one sample".into(),
            ));
        }
        if samples.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidControlLaw(
                "tabulated profile times must be strictly increasing".into(),
            ));
        }
        Ok(Self::Table(samples.into()))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Closure(f) => f(t),
            Self::Table(samples) => {
                let first = samples.first().unwrap();
                let last = samples.last().unwrap();
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let idx = samples.partition_point(|&(ti, _)| ti <= t);
                let (t0, v0) = samples[idx - 1];
                let (t1, v1) = samples[idx];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Profile::Zero"),
            Self::Closure(_) => write!(f, "Profile::Closure"),
            Self::Table(s) => write!(f, "Profile::Table({} samples)", s.len()),
        }
    }
}

/// Sinusoidal external force `amplitude * sin(freq * t)`, entering the
/// potential as `-amplitude sin(freq t) x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Drive {
    pub amplitude: f64,
    pub freq: f64,
}

impl Drive {
    pub fn force(&self, t: f64) -> f64 {
        self.amplitude * (self.freq * t).sin()
    }
}

/// Parameterization of the control potential
/// `V_c(x, t) = (k + alpha) x^2 / 2 - (alpha p_ref(t) + f(t) + drive(t)) x`.
///
/// `k` modifies the spring, `force` is the open-loop profile, and
/// `(alpha, ref_path)` add a restoring force toward a reference path. The
/// drive term models an external disturbance and is not counted as control
/// force in cost accounting.
#[derive(Clone, Debug)]
pub struct ControlLaw {
    pub k: f64,
    pub force: Profile,
    alpha: f64,
    ref_path: Option<Profile>,
    pub drive: Option<Drive>,
}

impl ControlLaw {
    /// No control at all.
    pub fn free() -> Self {
        Self {
            k: 0.0,
            force: Profile::Zero,
            alpha: 0.0,
            ref_path: None,
            drive: None,
        }
    }

    /// Pure spring modification.
    pub fn spring(k: f64) -> Self {
        Self {
            k,
            ..Self::free()
        }
    }

    pub fn with_force(mut self, force: Profile) -> Self {
        self.force = force;
        self
    }

    pub fn with_drive(mut self, amplitude: f64, freq: f64) -> Self {
        self.drive = Some(Drive { amplitude, freq });
        self
    }

    /// Adds a feedback term of gain `alpha >= 0` tracking `ref_path`.
    pub fn with_feedback(mut self, alpha: f64, ref_path: Profile) -> Result<Self> {
        if alpha < 0.0 || !alpha.is_finite() {
            return Err(Error::NegativeGain { alpha });
        }
        self.alpha = alpha;
        self.ref_path = Some(ref_path);
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ref_path(&self) -> Option<&Profile> {
        self.ref_path.as_ref()
    }

    /// Total spring coefficient added by the control, `k + alpha`.
    pub fn spring_total(&self) -> f64 {
        self.k + self.alpha
    }

    fn ref_value(&self, t: f64) -> f64 {
        self.ref_path.as_ref().map_or(0.0, |p| p.eval(t))
    }

    /// Spatially uniform part of the control force,
    /// `alpha p_ref(t) + f(t)`.
    pub fn uniform_control_force(&self, t: f64) -> f64 {
        self.alpha * self.ref_value(t) + self.force.eval(t)
    }

    /// Uniform control force plus the external drive.
    pub fn uniform_total_force(&self, t: f64) -> f64 {
        self.uniform_control_force(t) + self.drive.map_or(0.0, |d| d.force(t))
    }

    /// Control force at a point: `-(k + alpha) x + alpha p_ref(t) + f(t)`.
    pub fn control_force(&self, x: f64, t: f64) -> f64 {
        -self.spring_total() * x + self.uniform_control_force(t)
    }

    /// `<F_c>` from the first moment.
    pub fn expected_force(&self, mean_x: f64, t: f64) -> f64 {
        self.control_force(mean_x, t)
    }

    /// `<F_c^2>` from the first and second moments.
    pub fn expected_force_sq(&self, mean_x: f64, second_moment: f64, t: f64) -> f64 {
        let s = self.spring_total();
        let u = self.uniform_control_force(t);
        s * s * second_moment - 2.0 * s * u * mean_x + u * u
    }

    /// Explicit time dependence of the full control potential.
    pub fn time_dependent(&self) -> bool {
        !self.force.is_zero() || self.drive.is_some() || self.alpha > 0.0
    }
}

/// Bare oscillator plus control law; the overall potential
/// `omega^2 x^2 / 2 + V_c(x, t)`.
#[derive(Clone, Debug)]
pub struct ControlledHarmonic {
    pub harmonic: HarmonicPotential,
    pub law: ControlLaw,
}

impl ControlledHarmonic {
    pub fn new(harmonic: HarmonicPotential, law: ControlLaw) -> Self {
        Self { harmonic, law }
    }

    /// Effective squared frequency of the quadratic part,
    /// `omega^2 + k + alpha`.
    pub fn omega_sq_effective(&self) -> f64 {
        self.harmonic.omega() * self.harmonic.omega() + self.law.spring_total()
    }
}

impl Potential for ControlledHarmonic {
    fn eval(&self, x: f64, t: f64) -> f64 {
        0.5 * self.omega_sq_effective() * x * x - self.law.uniform_total_force(t) * x
    }
    fn time_dependent(&self) -> bool {
        self.law.time_dependent()
    }
}

/// Convenience wrapper matching the spec-level operation.
pub fn eval_controlled(h: &HarmonicPotential, c: &ControlLaw, x: f64, t: f64) -> f64 {
    ControlledHarmonic::new(*h, c.clone()).eval(x, t)
}

/// The position-to-bit rule a controller computes; `false` selects branch 0.
pub type BitProgram = Arc<dyn Fn(f64) -> bool + Send + Sync>;

/// Sign rule: branch 1 for `x > 0`, branch 0 for `x <= 0`. The boundary
/// point belongs to branch 0; ties never split amplitude.
pub fn sign_program() -> BitProgram {
    Arc::new(|x: f64| x > 0.0)
}

/// Two potential branches plus the program selecting between them.
///
/// Evaluating it as a [`Potential`] yields the effective potential
/// `V(x, program(x))`.
#[derive(Clone)]
pub struct ProgrammedPair {
    v0: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    v1: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    program: BitProgram,
}

impl ProgrammedPair {
    pub fn new(
        v0: impl Fn(f64) -> f64 + Send + Sync + 'static,
        v1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        program: BitProgram,
    ) -> Self {
        Self {
            v0: Arc::new(v0),
            v1: Arc::new(v1),
            program,
        }
    }

    /// Default preset: two harmonic branches displaced by `offset` to either
    /// side, `v0 = omega^2 (x + offset)^2 / 2` and
    /// `v1 = omega^2 (x - offset)^2 / 2`, selected by the sign rule. The
    /// result is an asymmetric double well with a cusp at the origin.
    pub fn displaced_harmonic(omega: f64, offset: f64) -> Result<Self> {
        let h = HarmonicPotential::new(omega)?;
        let w = h.omega();
        Ok(Self::new(
            move |x: f64| 0.5 * w * w * (x + offset) * (x + offset),
            move |x: f64| 0.5 * w * w * (x - offset) * (x - offset),
            sign_program(),
        ))
    }

    pub fn program(&self, x: f64) -> bool {
        (self.program)(x)
    }

    pub fn program_fn(&self) -> BitProgram {
        Arc::clone(&self.program)
    }

    /// Value of one branch regardless of the program.
    pub fn branch(&self, bit: bool, x: f64) -> f64 {
        if bit {
            (self.v1)(x)
        } else {
            (self.v0)(x)
        }
    }

    /// One branch as a standalone autonomous potential.
    pub fn branch_potential(&self, bit: bool) -> BranchPotential {
        BranchPotential {
            pair: self.clone(),
            bit,
        }
    }

    /// `V_eff(x) = V(x, program(x))`.
    pub fn effective(&self, x: f64) -> f64 {
        self.branch(self.program(x), x)
    }
}

impl Potential for ProgrammedPair {
    fn eval(&self, x: f64, _t: f64) -> f64 {
        self.effective(x)
    }
    fn time_dependent(&self) -> bool {
        false
    }
}

impl fmt::Debug for ProgrammedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProgrammedPair")
    }
}

/// A single branch of a [`ProgrammedPair`] viewed as a potential.
#[derive(Clone, Debug)]
pub struct BranchPotential {
    pair: ProgrammedPair,
    bit: bool,
}

impl Potential for BranchPotential {
    fn eval(&self, x: f64, _t: f64) -> f64 {
        self.pair.branch(self.bit, x)
    }
    fn time_dependent(&self) -> bool {
        false
    }
}

/// Effective potential of two oscillators joined by the cross force
/// `k (x2 - x1)` on the first and `k (x1 - x2)` on the second:
/// `V = (omega^2 + k)(x1^2 + x2^2)/2 - k x1 x2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoupledPotential {
    omega: f64,
    k: f64,
}

impl CoupledPotential {
    pub fn new(omega: f64, k: f64) -> Result<Self> {
        if omega <= 0.0 || !omega.is_finite() {
            return Err(Error::UnboundMode {
                omega_sq: omega * omega * omega.signum(),
            });
        }
        if k < 0.0 || !k.is_finite() {
            return Err(Error::InvalidControlLaw(format!(
                "coupling strength must be >= 0, got {k}"
            )));
        }
        if omega * omega + 2.0 * k <= 0.0 {
            return Err(Error::UnboundMode {
                omega_sq: omega * omega + 2.0 * k,
            });
        }
        Ok(Self { omega, k })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Normal-mode frequencies after rotating to
    /// `y1 = (x1+x2)/sqrt(2)`, `y2 = (x1-x2)/sqrt(2)`:
    /// `(omega, sqrt(omega^2 + 2k))`.
    pub fn normal_modes(&self) -> (f64, f64) {
        (
            self.omega,
            (self.omega * self.omega + 2.0 * self.k).sqrt(),
        )
    }
}

impl Potential2 for CoupledPotential {
    fn eval(&self, x1: f64, x2: f64, _t: f64) -> f64 {
        let omega_sq = self.omega * self.omega + self.k;
        // k * (x1 * x2) keeps the value exactly symmetric under swapping.
        0.5 * omega_sq * (x1 * x1 + x2 * x2) - self.k * (x1 * x2)
    }
    fn time_dependent(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn controlled_evaluation_examples() {
        let h = HarmonicPotential::new(1.0).unwrap();
        // Bare oscillator at x = 2.
        assert_abs_diff_eq!(eval_controlled(&h, &ControlLaw::free(), 2.0, 0.3), 2.0);
        // Spring detuning k = 3 turns omega = 1 into Omega = 2.
        assert_abs_diff_eq!(eval_controlled(&h, &ControlLaw::spring(3.0), 1.0, 0.0), 2.0);
        // Feedback toward a constant reference.
        let law = ControlLaw::free()
            .with_feedback(10.0, Profile::closure(|_| 1.0))
            .unwrap();
        assert_abs_diff_eq!(eval_controlled(&h, &law, 1.0, 7.0), -4.5);
    }

    #[test]
    fn negative_gain_is_rejected() {
        let r = ControlLaw::free().with_feedback(-1.0, Profile::Zero);
        assert!(matches!(r, Err(Error::NegativeGain { .. })));
    }

    #[test]
    fn programmed_pair_selects_branch_by_sign() {
        let pair = ProgrammedPair::displaced_harmonic(1.0, 1.0).unwrap();
        // x <= 0 takes branch 0 = (x+1)^2/2; the boundary belongs to branch 0.
        assert_abs_diff_eq!(pair.effective(-0.5), 0.5 * 0.25);
        assert_abs_diff_eq!(pair.effective(0.0), 0.5);
        assert_abs_diff_eq!(pair.branch(false, 0.0), 0.5);
        // x > 0 takes branch 1 = (x-1)^2/2.
        assert_abs_diff_eq!(pair.effective(0.5), 0.5 * 0.25);
    }

    #[test]
    fn identical_branches_make_the_program_irrelevant() {
        let pair = ProgrammedPair::new(
            |x| x * x,
            |x| x * x,
            sign_program(),
        );
        for x in [-2.0, -0.1, 0.0, 0.4, 3.0] {
            assert_abs_diff_eq!(pair.effective(x), x * x);
        }
    }

    #[test]
    fn effective_potential_is_total_and_finite_on_a_grid() {
        let pair = ProgrammedPair::displaced_harmonic(1.0, 1.0).unwrap();
        let grid = crate::grid::Grid::new(-20.0, 20.0, 256).unwrap();
        for x in grid.points() {
            assert!(pair.effective(x).is_finite());
        }
    }

    #[test]
    fn coupled_effective_examples() {
        let decoupled = CoupledPotential::new(1.3, 0.0).unwrap();
        assert_abs_diff_eq!(
            decoupled.eval(1.0, 1.0, 0.0),
            1.3 * 1.3,
            epsilon = 1e-15
        );
        let c = CoupledPotential::new(1.0, 1.5).unwrap();
        assert_abs_diff_eq!(c.eval(1.0, 1.0, 0.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn normal_mode_frequencies() {
        let c = CoupledPotential::new(1.0, 0.0).unwrap();
        assert_eq!(c.normal_modes(), (1.0, 1.0));
        let c = CoupledPotential::new(1.0, 1.5).unwrap();
        let (w1, w2) = c.normal_modes();
        assert_abs_diff_eq!(w1, 1.0);
        assert_abs_diff_eq!(w2, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn table_profile_interpolates_linearly() {
        let p = Profile::table(vec![(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(p.eval(0.5), 1.0);
        assert_abs_diff_eq!(p.eval(1.5), 1.0);
        // Held constant outside the table.
        assert_abs_diff_eq!(p.eval(-1.0), 0.0);
        assert_abs_diff_eq!(p.eval(3.0), 0.0);
        assert!(Profile::table(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
    }

    proptest! {
        #[test]
        fn free_law_reduces_to_bare_harmonic(x in -50.0f64..50.0, t in 0.0f64..10.0) {
            let h = HarmonicPotential::new(1.7).unwrap();
            let v = eval_controlled(&h, &ControlLaw::free(), x, t);
            prop_assert_eq!(v, h.eval(x, t));
        }

        #[test]
        fn coupled_potential_is_swap_symmetric(
            x1 in -10.0f64..10.0,
            x2 in -10.0f64..10.0,
        ) {
            let c = CoupledPotential::new(1.0, 1.5).unwrap();
            prop_assert_eq!(c.eval(x1, x2, 0.0), c.eval(x2, x1, 0.0));
        }

        #[test]
        fn mode_rotation_diagonalizes_the_coupling(
            x1 in -10.0f64..10.0,
            x2 in -10.0f64..10.0,
            k in 0.0f64..4.0,
        ) {
            let c = CoupledPotential::new(1.0, k).unwrap();
            let (w1, w2) = c.normal_modes();
            let y1 = (x1 + x2) / std::f64::consts::SQRT_2;
            let y2 = (x1 - x2) / std::f64::consts::SQRT_2;
            let rotated = 0.5 * w1 * w1 * y1 * y1 + 0.5 * w2 * w2 * y2 * y2;
            prop_assert!((c.eval(x1, x2, 0.0) - rotated).abs() < 1e-12);
        }
    }
}
