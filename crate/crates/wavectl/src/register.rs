//! A physical coordinate joined to a computational bit register.
//!
//! The state carries one amplitude array per register value. Between control
//! ticks each component evolves under its own potential branch with no
//! coupling between components; at tick times the controller recomputes the
//! bit from position across the whole superposition.
//!
//! A bare assignment `C := b(x)` is not unitary, so the tick is realized as
//! a per-point permutation: wherever the dominant amplitude at `x` sits in
//! the component disagreeing with `b(x)`, the two components are swapped at
//! that point. On a state whose amplitude occupies only the consistent
//! branch — true immediately after every tick — this acts exactly as the
//! assignment, and it conserves the per-point total density always.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::ProgrammedPair;
use crate::propagate::{EvolutionSpec, Stepper};
use crate::state::{WaveFunction, WaveFunction2};
use crate::trajectory::Trajectory;

/// Two-component register state over a 1D grid; component index is the
/// register value.
#[derive(Clone, Debug)]
pub struct RegisterState {
    grid: Grid,
    components: [Vec<Complex64>; 2],
}

impl RegisterState {
    /// Routes each amplitude to the component named by `program(x)`,
    /// leaving the other component zero there. Norm is preserved exactly.
    pub fn classify(wf: &WaveFunction, program: impl Fn(f64) -> bool) -> Self {
        let grid = wf.grid().clone();
        let n = grid.len();
        let mut components = [vec![Complex64::default(); n], vec![Complex64::default(); n]];
        for (i, &a) in wf.amplitudes().iter().enumerate() {
            let c = program(grid.x(i)) as usize;
            components[c][i] = a;
        }
        Self { grid, components }
    }

    /// Builds a register state from raw component amplitudes.
    pub fn from_components(
        grid: Grid,
        component0: Vec<Complex64>,
        component1: Vec<Complex64>,
    ) -> Result<Self> {
        if component0.len() != grid.len() || component1.len() != grid.len() {
            return Err(Error::InvalidGrid(
                "component lengths must match the grid".into(),
            ));
        }
        Ok(Self {
            grid,
            components: [component0, component1],
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, bit: bool) -> &[Complex64] {
        &self.components[bit as usize]
    }

    /// `sum |psi_c|^2 dx` of one component.
    pub fn component_weight(&self, bit: bool) -> f64 {
        let dx = self.grid.dx();
        self.components[bit as usize]
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            * dx
    }

    /// Total norm across both components.
    pub fn total_norm(&self) -> f64 {
        (self.component_weight(false) + self.component_weight(true)).sqrt()
    }

    /// Weight sitting in the component that disagrees with the program.
    pub fn mismatch_weight(&self, program: impl Fn(f64) -> bool) -> f64 {
        let dx = self.grid.dx();
        let mut sum = 0.0;
        for i in 0..self.grid.len() {
            let wrong = !program(self.grid.x(i)) as usize;
            sum += self.components[wrong][i].norm_sqr();
        }
        sum * dx
    }

    /// One control tick: at each grid point, swap the two component
    /// amplitudes iff the larger amplitude sits in the component that
    /// disagrees with `program(x)`. A per-point permutation, so norm and
    /// per-point total density are conserved exactly.
    pub fn control_tick(&mut self, program: impl Fn(f64) -> bool) {
        let (left, right) = self.components.split_at_mut(1);
        let c0 = &mut left[0];
        let c1 = &mut right[0];
        for i in 0..self.grid.len() {
            let target = program(self.grid.x(i)) as usize;
            let weights = [c0[i].norm_sqr(), c1[i].norm_sqr()];
            if weights[1 - target] > weights[target] {
                std::mem::swap(&mut c0[i], &mut c1[i]);
            }
        }
    }

    /// Per-point total density `|psi_0(x)|^2 + |psi_1(x)|^2`.
    pub fn density(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.components[0][i].norm_sqr() + self.components[1][i].norm_sqr())
            .collect()
    }

    /// Coherent sum of the components, renormalized.
    ///
    /// Meaningful as a single-coordinate state when the components occupy
    /// essentially disjoint regions, which holds up to the mismatch weight.
    pub fn marginal(&self) -> WaveFunction {
        let amps: Vec<Complex64> = (0..self.grid.len())
            .map(|i| self.components[0][i] + self.components[1][i])
            .collect();
        let dx = self.grid.dx();
        let norm = (amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * dx).sqrt();
        let scaled = amps.into_iter().map(|a| a / norm).collect();
        WaveFunction::from_amplitudes(self.grid.clone(), scaled)
            .expect("marginal length matches grid by construction")
    }

    fn density_moments(&self) -> (f64, f64) {
        let dx = self.grid.dx();
        let mut mean = 0.0;
        let mut second = 0.0;
        for (i, rho) in self.density().iter().enumerate() {
            let x = self.grid.x(i);
            mean += x * rho * dx;
            second += x * x * rho * dx;
        }
        (mean, second)
    }

    /// Block-diagonal energy: each component feels its own branch.
    pub fn energy(&self, pair: &ProgrammedPair) -> f64 {
        let dx = self.grid.dx();
        let mut total = 0.0;
        for bit in [false, true] {
            let comp = &self.components[bit as usize];
            let wf = WaveFunction::from_amplitudes(self.grid.clone(), comp.clone())
                .expect("component length matches grid");
            total += wf.kinetic_energy();
            total += comp
                .iter()
                .enumerate()
                .map(|(i, a)| pair.branch(bit, self.grid.x(i)) * a.norm_sqr())
                .sum::<f64>()
                * dx;
        }
        total
    }
}

/// Control cadence: one tick every `tau_c` of physical time, with the
/// computation itself idealized as instantaneous.
#[derive(Clone, Copy, Debug)]
pub struct TickSchedule {
    tau_c: f64,
}

impl TickSchedule {
    pub fn new(tau_c: f64) -> Result<Self> {
        if tau_c <= 0.0 || !tau_c.is_finite() {
            return Err(Error::IncompatibleSchedule(format!(
                "tau_c must be positive, got {tau_c}"
            )));
        }
        Ok(Self { tau_c })
    }

    pub fn tau_c(&self) -> f64 {
        self.tau_c
    }

    /// Number of integration steps per tick; `tau_c` must be an integer
    /// multiple of `dt`, and at least `dt` itself.
    pub fn steps_per_tick(&self, dt: f64) -> Result<usize> {
        let ratio = self.tau_c / dt;
        let m = ratio.round();
        if m < 1.0 || (ratio - m).abs() > 1e-6 * m {
            return Err(Error::IncompatibleSchedule(format!(
                "tau_c ({}) is not an integer multiple of dt ({dt})",
                self.tau_c
            )));
        }
        Ok(m as usize)
    }
}

/// Result of a programmed evolution: final register state, the recorded
/// trajectory of the total density, and the mismatch weight observed just
/// before every tick.
#[derive(Debug)]
pub struct ProgrammedRun {
    pub state: RegisterState,
    pub trajectory: Trajectory,
    /// `(t, mismatch_weight)` sampled immediately before each tick.
    pub pre_tick_mismatch: Vec<(f64, f64)>,
}

impl ProgrammedRun {
    pub fn max_pre_tick_mismatch(&self) -> f64 {
        self.pre_tick_mismatch
            .iter()
            .map(|&(_, w)| w)
            .fold(0.0, f64::max)
    }
}

/// Alternates free component-wise evolution (component `c` feels branch `c`
/// everywhere, with no inter-component coupling) with a control tick every
/// `tau_c`. Records run at the spec cadence and reflect the pre-tick state
/// whenever a record coincides with a tick.
pub fn evolve_programmed(
    state: &RegisterState,
    pair: &ProgrammedPair,
    schedule: &TickSchedule,
    spec: &EvolutionSpec,
) -> Result<ProgrammedRun> {
    let steps_per_tick = schedule.steps_per_tick(spec.dt())?;
    let program = pair.program_fn();
    let mut st = state.clone();
    let mut stepper = Stepper::new(&st.grid, spec.dt());
    let branch0 = pair.branch_potential(false);
    let branch1 = pair.branch_potential(true);
    let steps = spec.steps();

    let mut traj = Trajectory::new();
    traj.time_dependent = false;
    let mut pre_tick = Vec::new();

    let record = |st: &RegisterState, t: f64, traj: &mut Trajectory| -> Result<()> {
        let (mean, second) = st.density_moments();
        let spread = (second - mean * mean).max(0.0).sqrt();
        if mean - 4.0 * spread < st.grid.x_min() || mean + 4.0 * spread > st.grid.x_max() {
            return Err(Error::BoundaryViolation { t });
        }
        traj.times.push(t);
        traj.mean_x.push(mean);
        traj.spread.push(spread);
        traj.norm.push(st.total_norm());
        traj.energy.push(st.energy(pair));
        traj.force_expect.push(0.0);
        traj.cost_accum.push(0.0);
        traj.mismatch_weight.push(st.mismatch_weight(&*program));
        Ok(())
    };

    record(&st, 0.0, &mut traj)?;
    for i in 1..=steps {
        let t_prev = (i - 1) as f64 * spec.dt();
        stepper.step_amplitudes(&mut st.components[0], &branch0, t_prev);
        stepper.step_amplitudes(&mut st.components[1], &branch1, t_prev);
        let t = i as f64 * spec.dt();
        if i % spec.record_every() == 0 || i == steps {
            record(&st, t, &mut traj)?;
        }
        if i % steps_per_tick == 0 {
            pre_tick.push((t, st.mismatch_weight(&*program)));
            st.control_tick(&*program);
        }
    }
    Ok(ProgrammedRun {
        state: st,
        trajectory: traj,
        pre_tick_mismatch: pre_tick,
    })
}

/// Register target of the cross-coupled two-system program: each system's
/// bit is computed from the *other* system's position, `C1 = [x2 > 0]`,
/// `C2 = [x1 > 0]`, with boundaries assigned to 0.
pub fn cross_target(x1: f64, x2: f64) -> usize {
    ((x2 > 0.0) as usize) << 1 | ((x1 > 0.0) as usize)
}

/// Four-component register state over a 2D grid, component index
/// `C1 * 2 + C2`.
#[derive(Clone, Debug)]
pub struct RegisterState2 {
    grid: Grid,
    components: [Vec<Complex64>; 4],
}

impl RegisterState2 {
    /// Routes amplitude according to the cross program.
    pub fn classify(wf: &WaveFunction2) -> Self {
        let grid = wf.grid().clone();
        let n = grid.len();
        let mut components = std::array::from_fn(|_| vec![Complex64::default(); n * n]);
        for i1 in 0..n {
            let x1 = grid.x(i1);
            for i2 in 0..n {
                let idx = i1 * n + i2;
                let target = cross_target(x1, grid.x(i2));
                let slot: &mut Vec<Complex64> = &mut components[target];
                slot[idx] = wf.amplitudes()[idx];
            }
        }
        Self { grid, components }
    }

    /// Puts all amplitude into one register component.
    pub fn prepared_in(wf: &WaveFunction2, component: usize) -> Self {
        let grid = wf.grid().clone();
        let n = grid.len();
        let mut components = std::array::from_fn(|_| vec![Complex64::default(); n * n]);
        components[component] = wf.amplitudes().to_vec();
        Self { grid, components }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, index: usize) -> &[Complex64] {
        &self.components[index]
    }

    pub fn component_weight(&self, index: usize) -> f64 {
        let da = self.grid.dx() * self.grid.dx();
        self.components[index]
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            * da
    }

    pub fn total_norm(&self) -> f64 {
        (0..4).map(|c| self.component_weight(c)).sum::<f64>().sqrt()
    }

    /// Weight outside the component the cross program names at each point.
    pub fn mismatch_weight(&self) -> f64 {
        let n = self.grid.len();
        let da = self.grid.dx() * self.grid.dx();
        let mut sum = 0.0;
        for i1 in 0..n {
            let x1 = self.grid.x(i1);
            for i2 in 0..n {
                let idx = i1 * n + i2;
                let target = cross_target(x1, self.grid.x(i2));
                for c in 0..4 {
                    if c != target {
                        sum += self.components[c][idx].norm_sqr();
                    }
                }
            }
        }
        sum * da
    }

    /// One cross-program tick: at each point, transpose the dominant
    /// component with the target component when they differ. A per-point
    /// permutation of the four amplitudes, hence norm-preserving.
    pub fn cross_program_tick(&mut self) {
        let n = self.grid.len();
        for i1 in 0..n {
            let x1 = self.grid.x(i1);
            for i2 in 0..n {
                let idx = i1 * n + i2;
                let target = cross_target(x1, self.grid.x(i2));
                let mut dominant = 0;
                let mut best = 0.0;
                for c in 0..4 {
                    let w = self.components[c][idx].norm_sqr();
                    if w > best {
                        best = w;
                        dominant = c;
                    }
                }
                if best > 0.0 && dominant != target {
                    let (a, b) = (dominant.min(target), dominant.max(target));
                    let (lo, hi) = self.components.split_at_mut(b);
                    std::mem::swap(&mut lo[a][idx], &mut hi[0][idx]);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::sign_program;
    use crate::state::GaussianState;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Grid {
        Grid::new(-15.0, 15.0, 512).unwrap()
    }

    fn program(x: f64) -> bool {
        x > 0.0
    }

    #[test]
    fn classify_splits_a_symmetric_packet_evenly() {
        let g = grid();
        let wf = WaveFunction::gaussian(&g, &GaussianState::new(0.0, 1.0).unwrap()).unwrap();
        let st = RegisterState::classify(&wf, program);
        // The x = 0 point itself lands in component 0, worth about dx * |psi(0)|^2.
        assert_abs_diff_eq!(st.component_weight(false), 0.5, epsilon = 2.0 * g.dx());
        assert_abs_diff_eq!(st.component_weight(true), 0.5, epsilon = 2.0 * g.dx());
        assert_abs_diff_eq!(st.total_norm(), 1.0, epsilon = 1e-12);
        assert!(st.mismatch_weight(program) < 1e-15);
    }

    #[test]
    fn classify_routes_one_sided_support_entirely() {
        let g = grid();
        let wf = WaveFunction::gaussian(&g, &GaussianState::new(-8.0, 1.0).unwrap()).unwrap();
        let st = RegisterState::classify(&wf, program);
        assert!(st.component_weight(true) < 1e-12);
        assert_abs_diff_eq!(st.component_weight(false), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn constant_program_leaves_component_one_empty() {
        let g = grid();
        let wf = WaveFunction::gaussian(&g, &GaussianState::new(0.0, 1.0).unwrap()).unwrap();
        let st = RegisterState::classify(&wf, |_| false);
        assert_eq!(st.component_weight(true), 0.0);
        assert_abs_diff_eq!(st.mismatch_weight(|_| false), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn tick_is_identity_on_a_consistent_state() {
        let g = grid();
        let wf = WaveFunction::gaussian(&g, &GaussianState::new(0.0, 1.0).unwrap()).unwrap();
        let st = RegisterState::classify(&wf, program);
        let mut ticked = st.clone();
        ticked.control_tick(program);
        for bit in [false, true] {
            for (a, b) in st.component(bit).iter().zip(ticked.component(bit)) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn tick_moves_fully_mismatched_amplitude() {
        let g = grid();
        let wf = WaveFunction::gaussian(&g, &GaussianState::new(-8.0, 1.0).unwrap()).unwrap();
        // Deliberately park the left-side packet in component 1.
        let mut st = RegisterState::from_components(
            g.clone(),
            vec![Complex64::default(); g.len()],
            wf.amplitudes().to_vec(),
        )
        .unwrap();
        assert_abs_diff_eq!(st.mismatch_weight(program), 1.0, epsilon = 1e-9);
        let norm_before = st.total_norm();
        st.control_tick(program);
        assert!(st.mismatch_weight(program) < 1e-12);
        assert_abs_diff_eq!(st.component_weight(false), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(st.total_norm(), norm_before, epsilon = 1e-15);
    }

    #[test]
    fn tick_preserves_norm_and_density_on_random_states() {
        let g = Grid::new(-4.0, 4.0, 64).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut rand_component = || {
            (0..64)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect::<Vec<_>>()
        };
        for _ in 0..10 {
            let mut st =
                RegisterState::from_components(g.clone(), rand_component(), rand_component())
                    .unwrap();
            let norm_before = st.total_norm();
            let density_before = st.density();
            st.control_tick(program);
            assert_abs_diff_eq!(st.total_norm(), norm_before, epsilon = 1e-15);
            for (a, b) in st.density().iter().zip(&density_before) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn schedule_must_divide_the_step() {
        let s = TickSchedule::new(0.1).unwrap();
        assert_eq!(s.steps_per_tick(0.05).unwrap(), 2);
        assert!(s.steps_per_tick(0.3).is_err());
        assert!(s.steps_per_tick(0.07).is_err());
        assert!(TickSchedule::new(0.0).is_err());
    }

    #[test]
    fn identical_branches_reduce_to_plain_evolution() {
        let g = grid();
        let pair = crate::potential::ProgrammedPair::new(
            |x| 0.5 * x * x,
            |x| 0.5 * x * x,
            sign_program(),
        );
        let gs = GaussianState::new(1.0, GaussianState::ground_state_width(1.0)).unwrap();
        let wf = WaveFunction::gaussian(&g, &gs).unwrap();
        let st = RegisterState::classify(&wf, |x| pair.program(x));
        let spec = EvolutionSpec::with_steps(1.0, 256, 16).unwrap();
        let run = evolve_programmed(&st, &pair, &TickSchedule::new(spec.dt()).unwrap(), &spec)
            .unwrap();
        let (plain, _) =
            crate::propagate::evolve(&wf, &crate::potential::HarmonicPotential::new(1.0).unwrap(), &spec, None)
                .unwrap();
        let marginal = run.state.marginal();
        assert!(crate::state::fidelity(&marginal, &plain).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn constant_program_never_accumulates_mismatch() {
        let g = grid();
        let pair = crate::potential::ProgrammedPair::new(
            |x| 0.5 * x * x,
            |x| 0.5 * x * x,
            std::sync::Arc::new(|_| false),
        );
        let gs = GaussianState::new(1.0, GaussianState::ground_state_width(1.0)).unwrap();
        let wf = WaveFunction::gaussian(&g, &gs).unwrap();
        let st = RegisterState::classify(&wf, |x| pair.program(x));
        let spec = EvolutionSpec::with_steps(1.0, 256, 32).unwrap();
        let run = evolve_programmed(&st, &pair, &TickSchedule::new(8.0 * spec.dt()).unwrap(), &spec)
            .unwrap();
        // No boundary exists, so nothing ever leaks.
        assert!(run.max_pre_tick_mismatch() < 1e-15);
        assert!(run.trajectory.mismatch_weight.iter().all(|w| *w < 1e-15));
    }

    #[test]
    fn cross_tick_drives_a_quadrant_packet_to_one_one() {
        let g = Grid::new(-10.0, 10.0, 64).unwrap();
        // Tight enough that the tail mass outside the quadrant is below 1e-9.
        let a = GaussianState::new(4.0, 0.5).unwrap();
        let wf = WaveFunction2::product(&g, &a, &a).unwrap();
        let mut st = RegisterState2::prepared_in(&wf, 0);
        st.cross_program_tick();
        assert!(st.component_weight(3) > 1.0 - 1e-9);
        assert_abs_diff_eq!(st.total_norm(), 1.0, epsilon = 1e-12);
        assert!(st.mismatch_weight() < 1e-9);
    }

    #[test]
    fn cross_tick_boundary_row_takes_branch_zero() {
        let g = Grid::new(-10.0, 10.0, 64).unwrap();
        let n = g.len();
        // Find the row index where x2 == 0 exactly.
        let i_zero = (0..n).find(|&i| g.x(i) == 0.0).unwrap();
        let mut amps = vec![Complex64::default(); n * n];
        // Amplitude on the x2 = 0 line at an x1 > 0 column.
        let i_pos = (0..n).find(|&i| g.x(i) > 0.0).unwrap();
        amps[i_pos * n + i_zero] = Complex64::new(1.0, 0.0);
        let wf = WaveFunction2::from_amplitudes(g, amps).unwrap();
        let mut st = RegisterState2::prepared_in(&wf, 0);
        st.cross_program_tick();
        // x2 <= 0 means C1 = 0; x1 > 0 means C2 = 1; component index 1.
        assert!(st.component_weight(1) > 0.0);
        assert_eq!(st.component_weight(3), 0.0);
    }

    #[test]
    fn cross_tick_preserves_norm_on_random_states() {
        let g = Grid::new(-4.0, 4.0, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = g.len();
        let mut components: [Vec<Complex64>; 4] = std::array::from_fn(|_| {
            (0..n * n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        });
        // Scale to unit total norm for a cleaner comparison.
        let da = g.dx() * g.dx();
        let total: f64 = components
            .iter()
            .flat_map(|c| c.iter())
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            * da;
        for c in &mut components {
            for a in c.iter_mut() {
                *a /= total.sqrt();
            }
        }
        let mut st = RegisterState2 {
            grid: g,
            components,
        };
        let before = st.total_norm();
        st.cross_program_tick();
        assert_abs_diff_eq!(st.total_norm(), before, epsilon = 1e-15);
    }
}
