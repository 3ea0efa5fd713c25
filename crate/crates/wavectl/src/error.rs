//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building states, evolving them, or
/// running scenarios.
#[derive(Debug, Error)]
pub enum Error {
    /// Grid construction rejected the requested layout.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A packet's support does not fit inside the grid domain. Sampling it
    /// anyway would alias through the periodic boundary.
    #[error(
        "packet support [{lo:.3}, {hi:.3}] exceeds domain [{x_min:.3}, {x_max:.3}] \
         (center {center}, spread {spread})"
    )]
    PacketOutsideDomain {
        center: f64,
        spread: f64,
        lo: f64,
        hi: f64,
        x_min: f64,
        x_max: f64,
    },

    /// Two states were combined across different grids.
    #[error("grid mismatch: operands live on different grids")]
    GridMismatch,

    /// A parameter combination leaves a mode unbound (non-positive squared
    /// frequency).
    #[error("unbound mode: effective squared frequency {omega_sq:.6} is not positive")]
    UnboundMode { omega_sq: f64 },

    /// Evolution detected the packet approaching the periodic boundary.
    #[error("packet reached within 4 sigma of the domain boundary at t = {t:.6}")]
    BoundaryViolation { t: f64 },

    /// Evolution parameters are inconsistent.
    #[error("invalid evolution spec: {0}")]
    InvalidSpec(String),

    /// Tick schedule incompatible with the step size.
    #[error("incompatible tick schedule: {0}")]
    IncompatibleSchedule(String),

    /// Feedback gains below zero are rejected (anti-feedback has no defined
    /// semantics here).
    #[error("negative feedback gain alpha = {alpha}")]
    NegativeGain { alpha: f64 },

    /// Control-cost evaluation needs a second moment the input cannot supply.
    #[error("control cost requires a second moment channel when k + alpha != 0")]
    MissingSecondMoment,

    /// A control law was built inconsistently.
    #[error("invalid control law: {0}")]
    InvalidControlLaw(String),

    /// Steering problem parameters rejected.
    #[error("invalid steering problem: {0}")]
    InvalidProblem(String),

    /// Lyapunov candidate or region rejected.
    #[error("invalid lyapunov spec: {0}")]
    InvalidLyapunov(String),

    /// Trajectory analysis could not produce the requested statistic.
    #[error("analysis failed: {0}")]
    Analysis(String),

    /// Scenario configuration failed validation; every offending field is
    /// listed.
    #[error("invalid scenario config:\n{}", .0.join("\n"))]
    ConfigValidation(Vec<String>),

    /// Requested preset does not exist.
    #[error("unknown preset '{name}'; available: {}", .available.join(", "))]
    UnknownPreset {
        name: String,
        available: Vec<String>,
    },

    /// Requested check suite does not exist.
    #[error("unknown suite '{name}'; available: {}", .available.join(", "))]
    UnknownSuite {
        name: String,
        available: Vec<String>,
    },

    /// Config file could not be parsed.
    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
