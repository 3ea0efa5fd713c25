//! End-to-end check suites: every headline claim of the library, runnable as
//! one command, each criterion reporting pass/fail with measured values.

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{analytic_center, ehrenfest_samples};
use crate::control::{
    control_cost_analytic, feedback_law, optimal_force, reference_path, SteeringProblem,
};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::{ControlLaw, ControlledHarmonic, HarmonicPotential};
use crate::propagate::{evolve, evolve_controlled, step, EvolutionSpec, Stepper};
use crate::scenario::{preset_config, run_scenario, CheckResult};
use crate::state::{GaussianState, WaveFunction};

/// Expectation-value ODE endpoint of the model-mismatch run without
/// feedback (force built for a frequency of 1.5 driving a plant at 1.0).
/// Frozen after cross-validation against an independent adaptive integrator.
pub const MISMATCH_NO_FEEDBACK_ENDPOINT: f64 = 2.069042820067;

/// Same scenario with feedback gain 10 toward the model path.
pub const MISMATCH_FEEDBACK_ENDPOINT: f64 = 5.782929372;

/// One acceptance criterion with its component checks.
#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: &'static str,
    pub title: &'static str,
    pub checks: Vec<CheckResult>,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render_line(&self) -> String {
        format!(
            "[{}] {} - {}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title
        )
    }
}

/// Result of one whole suite.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: String,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed())
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            out.push_str(&c.render_line());
            out.push('\n');
            for check in &c.checks {
                out.push_str(&format!(
                    "    [{}] {}: {}\n",
                    if check.passed { "pass" } else { "FAIL" },
                    check.name,
                    check.detail
                ));
            }
        }
        out.push_str(&format!(
            "suite {}: {}\n",
            self.name,
            if self.all_passed() {
                "all criteria passed"
            } else {
                "some criteria FAILED"
            }
        ));
        out
    }
}

pub fn available_suites() -> Vec<&'static str> {
    vec!["acceptance", "invariants"]
}

const CRITERIA: [(&str, &str); 8] = [
    ("c1", "steering benchmark reproduction (controlled vs ballistic path)"),
    ("c2", "feedback-under-mismatch reproduction against the ODE oracle"),
    ("c3", "minimum-effort force: closure, optimality certificate, cost oracle"),
    ("c4", "coupled pair: normal-mode frequencies and ground-state correlation"),
    ("c5", "programmed potential: stroboscopic limit and tick-leak scaling"),
    ("c6", "numerical invariants: unitarity, linearity, energy, gaussianity, convergence"),
    ("c7", "resonance response grows as detuning closes on the drive"),
    ("c8", "feedback trade-off: tracking improves, cost grows with gain"),
];

/// Runs one named suite, writing scenario outputs under `out_dir`.
pub fn run_suite(name: &str, out_dir: &Path) -> Result<SuiteReport> {
    let ids: Vec<&'static str> = match name {
        "acceptance" => CRITERIA.iter().map(|(id, _)| *id).collect(),
        "invariants" => vec!["c6"],
        _ => {
            return Err(Error::UnknownSuite {
                name: name.to_string(),
                available: available_suites().iter().map(|s| s.to_string()).collect(),
            })
        }
    };
    let mut criteria = Vec::new();
    for id in ids {
        criteria.push(run_criterion(id, out_dir)?);
    }
    Ok(SuiteReport {
        name: name.to_string(),
        criteria,
    })
}

/// Runs a single acceptance criterion.
pub fn run_criterion(id: &'static str, out_dir: &Path) -> Result<CriterionResult> {
    let title = CRITERIA
        .iter()
        .find(|(cid, _)| *cid == id)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::UnknownSuite {
            name: id.to_string(),
            available: CRITERIA.iter().map(|(cid, _)| cid.to_string()).collect(),
        })?;
    let checks = match id {
        "c1" => preset_checks("fig-position", out_dir)?,
        "c2" => criterion_feedback(out_dir)?,
        "c3" => criterion_optimality(out_dir)?,
        "c4" => preset_checks("coupled-correlation", out_dir)?,
        "c5" => preset_checks("programmed-effective", out_dir)?,
        "c6" => criterion_invariants()?,
        "c7" => preset_checks("resonance-shift", out_dir)?,
        "c8" => criterion_tradeoff()?,
        _ => unreachable!(),
    };
    Ok(CriterionResult { id, title, checks })
}

fn preset_checks(preset: &str, out_dir: &Path) -> Result<Vec<CheckResult>> {
    let config = preset_config(preset)?;
    let summary = run_scenario(&config, out_dir)?;
    Ok(summary.checks)
}

fn criterion_feedback(out_dir: &Path) -> Result<Vec<CheckResult>> {
    let mut checks = preset_checks("fig-feedback", out_dir)?;

    // The live ODE oracle must still agree with the endpoints frozen before
    // the grid implementation existed.
    let prob = SteeringProblem::new(1.5, 1.0, 5.0, 5.0)?;
    let h_true = HarmonicPotential::new(1.0)?;
    let spec = EvolutionSpec::with_steps(5.0, 8192, 8)?;
    let open = ControlLaw::free().with_force(optimal_force(&prob));
    let fb = feedback_law(&prob, 10.0)?;
    let live_nf = ehrenfest_samples(1.0, 0.0, &h_true, &open, &spec)
        .last()
        .unwrap()
        .mean;
    let live_fb = ehrenfest_samples(1.0, 0.0, &h_true, &fb, &spec)
        .last()
        .unwrap()
        .mean;
    checks.push(CheckResult::close_to(
        "ODE oracle reproduces the frozen no-feedback endpoint",
        live_nf,
        MISMATCH_NO_FEEDBACK_ENDPOINT,
        1e-6,
    ));
    checks.push(CheckResult::close_to(
        "ODE oracle reproduces the frozen feedback endpoint",
        live_fb,
        MISMATCH_FEEDBACK_ENDPOINT,
        1e-6,
    ));
    Ok(checks)
}

fn criterion_optimality(out_dir: &Path) -> Result<Vec<CheckResult>> {
    let mut checks = preset_checks("optimality-certificate", out_dir)?;

    // Closure over randomized steering problems.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let omega = rng.gen_range(0.3..3.0);
        let p0 = rng.gen_range(-3.0..3.0);
        let p_hat = rng.gen_range(-5.0..5.0);
        let horizon = rng.gen_range(1.0..8.0);
        let prob = SteeringProblem::new(omega, p0, p_hat, horizon)?;
        let end = analytic_center(p0, omega, 0.0, &optimal_force(&prob), horizon)?;
        worst = worst.max((end - p_hat).abs());
    }
    checks.push(CheckResult::below(
        "closure over 50 random steering problems",
        worst,
        1e-6,
    ));
    Ok(checks)
}

fn criterion_invariants() -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let grid = Grid::new(-12.0, 12.0, 1024)?;
    let h = HarmonicPotential::new(1.0)?;
    let sigma = GaussianState::ground_state_width(1.0);
    let displaced = WaveFunction::gaussian(&grid, &GaussianState::new(1.0, sigma)?)?;

    // Norm drift over ten thousand steps.
    let spec = EvolutionSpec::with_steps(10.0, 10_000, 100)?;
    let (_, traj) = evolve(&displaced, &h, &spec, None)?;
    let norm_drift = traj
        .norm
        .iter()
        .map(|n| (n - 1.0).abs())
        .fold(0.0, f64::max);
    checks.push(CheckResult::below(
        "norm drift over 1e4 steps",
        norm_drift,
        1e-9,
    ));

    // Linearity of one step on random superpositions.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    let dt = 0.005;
    let mut stepper = Stepper::new(&grid, dt);
    for _ in 0..5 {
        let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let b = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let psi1 = WaveFunction::gaussian(
            &grid,
            &GaussianState::new(rng.gen_range(-2.0..2.0), 0.6)?
                .with_momentum(rng.gen_range(-1.0..1.0)),
        )?;
        let psi2 = WaveFunction::gaussian(
            &grid,
            &GaussianState::new(rng.gen_range(-2.0..2.0), 0.8)?
                .with_momentum(rng.gen_range(-1.0..1.0)),
        )?;
        let combined: Vec<Complex64> = psi1
            .amplitudes()
            .iter()
            .zip(psi2.amplitudes())
            .map(|(&u, &v)| a * u + b * v)
            .collect();
        let mut lhs = WaveFunction::from_amplitudes(grid.clone(), combined)?;
        stepper.step(&mut lhs, &h, 0.0);
        let s1 = step(&psi1, &h, 0.0, dt);
        let s2 = step(&psi2, &h, 0.0, dt);
        let err: f64 = lhs
            .amplitudes()
            .iter()
            .zip(s1.amplitudes().iter().zip(s2.amplitudes()))
            .map(|(&l, (&u, &v))| (l - (a * u + b * v)).norm_sqr())
            .sum::<f64>()
            * grid.dx();
        worst = worst.max(err.sqrt());
    }
    checks.push(CheckResult::below(
        "one-step linearity on random superpositions",
        worst,
        1e-12,
    ));

    // Autonomous energy drift over one period with a fixed spring.
    let law = ControlLaw::spring(1.5);
    let omega_total = 2.5f64.sqrt();
    let period = 2.0 * std::f64::consts::PI / omega_total;
    let spec_e = EvolutionSpec::with_steps(period, 4096, 8)?;
    let (_, etraj) = evolve_controlled(&displaced, &h, &law, &spec_e)?;
    let e0 = etraj.energy[0];
    let edrift = etraj
        .energy
        .iter()
        .map(|e| (e - e0).abs() / e0.abs())
        .fold(0.0, f64::max);
    checks.push(CheckResult::below(
        "autonomous energy drift over one period",
        edrift,
        1e-6,
    ));

    // Gaussian closure: excess kurtosis along a controlled run.
    let prob = SteeringProblem::new(1.0, 1.0, 5.0, 5.0)?;
    let controlled =
        ControlledHarmonic::new(h, ControlLaw::free().with_force(optimal_force(&prob)));
    let spec_k = EvolutionSpec::with_steps(5.0, 4096, 8)?;
    let mut state = displaced.clone();
    let mut stepper_k = Stepper::new(&grid, spec_k.dt());
    let mut max_kurt = state.excess_kurtosis().abs();
    for i in 0..spec_k.steps() {
        stepper_k.step(&mut state, &controlled, i as f64 * spec_k.dt());
        if (i + 1) % 512 == 0 {
            max_kurt = max_kurt.max(state.excess_kurtosis().abs());
        }
    }
    checks.push(CheckResult::below(
        "excess kurtosis under quadratic control",
        max_kurt,
        1e-3,
    ));

    // Second-order convergence: halving dt cuts the path error by >= 3x.
    let mut errors = Vec::new();
    for steps in [512usize, 1024, 2048] {
        let spec_c = EvolutionSpec::with_steps(5.0, steps, steps / 64)?;
        let (_, tr) = evolve(&displaced, &h, &spec_c, None)?;
        let err = tr
            .times
            .iter()
            .zip(&tr.mean_x)
            .map(|(t, m)| (m - t.cos()).abs())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    let ratios = [errors[0] / errors[1], errors[1] / errors[2]];
    checks.push(CheckResult::new(
        "second-order step convergence",
        ratios.iter().all(|r| *r >= 3.0),
        ratios[0],
        format!("error ratios on halving dt: {ratios:?}, required >= 3"),
    ));
    Ok(checks)
}

fn criterion_tradeoff() -> Result<Vec<CheckResult>> {
    let prob = SteeringProblem::new(1.5, 1.0, 5.0, 5.0)?;
    let h_true = HarmonicPotential::new(1.0)?;
    let p_ref = reference_path(&prob);
    let sigma = GaussianState::ground_state_width(1.0);
    let spec = EvolutionSpec::with_steps(5.0, 8192, 8)?;

    let mut deviations = Vec::new();
    let mut costs = Vec::new();
    let gains = [0.0, 2.0, 10.0, 50.0];
    for &alpha in &gains {
        let law = feedback_law(&prob, alpha)?;
        let samples = ehrenfest_samples(1.0, 0.0, &h_true, &law, &spec);
        let dev = samples
            .iter()
            .map(|s| (s.mean - p_ref.eval(s.t)).abs())
            .fold(0.0, f64::max);
        let cost = control_cost_analytic(&h_true, &law, sigma, 1.0, 0.0, 5.0)?.total;
        deviations.push(dev);
        costs.push(cost);
    }
    let dev_monotone = deviations.windows(2).all(|w| w[1] < w[0]);
    let cost_monotone = costs.windows(2).all(|w| w[1] > w[0]);
    Ok(vec![
        CheckResult::new(
            "path deviation strictly decreases with gain",
            dev_monotone,
            *deviations.last().unwrap(),
            format!("max deviations {deviations:?} over gains {gains:?}"),
        ),
        CheckResult::new(
            "control cost strictly increases with gain",
            cost_monotone,
            *costs.last().unwrap(),
            format!("costs {costs:?} over gains {gains:?}"),
        ),
    ])
}
