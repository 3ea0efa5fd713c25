//! Simulation and control synthesis for wave packets in programmable
//! quadratic potentials.
//!
//! The crate provides, in dependency order:
//!
//! - [`grid`] / [`state`]: uniform grids, gaussian packets, and the
//!   observables extracted from them (mean position, spread, energy,
//!   covariance, fidelity);
//! - [`potential`]: the bare oscillator, control-law modifications,
//!   two-branch programmed potentials, and the coupled-oscillator pair;
//! - [`propagate`]: second-order split-operator evolution in 1D and 2D;
//! - [`analytic`]: closed-form center/width dynamics and the
//!   expectation-value ODE that serves as an independent oracle;
//! - [`control`]: minimum-effort force synthesis, reference paths, feedback
//!   laws, cost accounting, optimality certificates, coupling, detuning;
//! - [`register`]: a position coordinate joined to a computational bit
//!   register with unitary control ticks;
//! - [`stability`]: energy-constancy and Lyapunov-descent checks;
//! - [`scenario`]: declarative run configurations, named presets, and
//!   deterministic CSV emission;
//! - [`suite`]: the end-to-end check suites the CLI exposes.
//!
//! Units are `hbar = 1`, `mass = 1` throughout.

pub mod analysis;
pub mod analytic;
pub mod control;
pub mod error;
mod fft;
pub mod grid;
pub mod potential;
pub mod propagate;
pub mod quadrature;
pub mod register;
pub mod scenario;
pub mod stability;
pub mod state;
pub mod suite;
pub mod trajectory;

pub use error::{Error, Result};
pub use grid::Grid;
pub use potential::{
    ControlLaw, ControlledHarmonic, CoupledPotential, Drive, HarmonicPotential, Potential,
    Potential2, Profile, ProgrammedPair,
};
pub use propagate::{evolve, evolve2, evolve_controlled, step, EvolutionSpec, Stepper, Stepper2};
pub use state::{fidelity, GaussianState, WaveFunction, WaveFunction2};
pub use trajectory::{Observables, Trajectory};
