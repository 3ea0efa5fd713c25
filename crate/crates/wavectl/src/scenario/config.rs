//! Declarative scenario configuration.
//!
//! A config is TOML with nested tables. Numeric fields that accept `"auto"`
//! record their resolved values back into the summary, so any run can be
//! reproduced from its summary alone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A field that is either `"auto"` or an explicit value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutoOr<T> {
    Auto(String),
    Value(T),
}

impl<T> AutoOr<T> {
    pub fn auto() -> Self {
        Self::Auto("auto".to_string())
    }

    pub fn is_auto(&self) -> bool {
        matches!(self, Self::Auto(_))
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            Self::Auto(_) => None,
            Self::Value(v) => Some(v),
        }
    }

    fn check_keyword(&self, field: &str, problems: &mut Vec<String>) {
        if let Self::Auto(s) = self {
            if s != "auto" {
                problems.push(format!("{field}: expected a value or \"auto\", got \"{s}\""));
            }
        }
    }
}

/// Sinusoidal external drive parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub amplitude: f64,
    pub freq: f64,
}

/// Physical parameters shared by the presets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Physics {
    pub omega_true: f64,
    pub omega_model: f64,
    pub p0: f64,
    pub p_hat: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub alpha: f64,
    pub k: f64,
    pub coupling_k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveConfig>,
}

/// Discretization parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Numerics {
    pub grid_n: usize,
    /// `[x_min, x_max]` or `"auto"` (sized from the planned analytic path).
    pub domain: AutoOr<[f64; 2]>,
    /// Step size or `"auto"` (`T / 4096`, refined if the fastest frequency
    /// in play demands it).
    pub dt: AutoOr<f64>,
    pub record_every: usize,
}

/// Parameters of the programmed two-branch potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Programmed {
    /// Branch displacement `d`: wells at `-d` and `+d`.
    pub branch_offset: f64,
    /// Curvature of both branches.
    pub branch_omega: f64,
    /// Control interval, or `"auto"` for one tick every step.
    pub tau_c: AutoOr<f64>,
    /// Packet starting position and velocity for the programmed run.
    pub p0: f64,
    pub velocity: f64,
}

/// One requested output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSpec {
    pub channel: String,
    pub path: String,
}

/// A complete scenario description. Preset constructors fill every field;
/// user files override selectively via [`ConfigPatch`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub preset: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub physics: Physics,
    pub numerics: Numerics,
    pub programmed: Programmed,
    /// Empty means "emit every channel under its default file name".
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<OutputSpec>,
}

impl ScenarioConfig {
    /// Validates every field, collecting all problems rather than stopping
    /// at the first.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let p = &self.physics;
        for (name, v) in [
            ("physics.omega_true", p.omega_true),
            ("physics.omega_model", p.omega_model),
            ("physics.T", p.horizon),
        ] {
            if v <= 0.0 || !v.is_finite() {
                problems.push(format!("{name}: must be positive and finite, got {v}"));
            }
        }
        for (name, v) in [
            ("physics.p0", p.p0),
            ("physics.p_hat", p.p_hat),
            ("physics.k", p.k),
        ] {
            if !v.is_finite() {
                problems.push(format!("{name}: must be finite, got {v}"));
            }
        }
        if p.alpha < 0.0 || !p.alpha.is_finite() {
            problems.push(format!(
                "physics.alpha: must be >= 0 and finite, got {}",
                p.alpha
            ));
        }
        if p.coupling_k < 0.0 || !p.coupling_k.is_finite() {
            problems.push(format!(
                "physics.coupling_k: must be >= 0 and finite, got {}",
                p.coupling_k
            ));
        }
        if let Some(d) = &p.drive {
            if !d.amplitude.is_finite() || d.freq <= 0.0 || !d.freq.is_finite() {
                problems.push(format!(
                    "physics.drive: amplitude must be finite and freq positive, got {d:?}"
                ));
            }
        }

        let n = &self.numerics;
        if n.grid_n < 16 || !n.grid_n.is_power_of_two() {
            problems.push(format!(
                "numerics.grid_n: must be a power of two >= 16, got {}",
                n.grid_n
            ));
        }
        if n.record_every == 0 {
            problems.push("numerics.record_every: must be >= 1".to_string());
        }
        n.domain.check_keyword("numerics.domain", &mut problems);
        if let Some([lo, hi]) = n.domain.value() {
            if hi <= lo || !lo.is_finite() || !hi.is_finite() {
                problems.push(format!(
                    "numerics.domain: must be an increasing finite pair, got [{lo}, {hi}]"
                ));
            }
        }
        n.dt.check_keyword("numerics.dt", &mut problems);
        if let Some(&dt) = n.dt.value() {
            if dt <= 0.0 || !dt.is_finite() {
                problems.push(format!("numerics.dt: must be positive, got {dt}"));
            }
        }

        let g = &self.programmed;
        if g.branch_offset <= 0.0 || !g.branch_offset.is_finite() {
            problems.push(format!(
                "programmed.branch_offset: must be positive, got {}",
                g.branch_offset
            ));
        }
        if g.branch_omega <= 0.0 || !g.branch_omega.is_finite() {
            problems.push(format!(
                "programmed.branch_omega: must be positive, got {}",
                g.branch_omega
            ));
        }
        g.tau_c.check_keyword("programmed.tau_c", &mut problems);
        if let Some(&tau) = g.tau_c.value() {
            if tau <= 0.0 || !tau.is_finite() {
                problems.push(format!("programmed.tau_c: must be positive, got {tau}"));
            }
        }
        if !g.p0.is_finite() || !g.velocity.is_finite() {
            problems.push("programmed.p0 / programmed.velocity: must be finite".to_string());
        }

        for (i, o) in self.outputs.iter().enumerate() {
            if o.channel.is_empty() || o.path.is_empty() {
                problems.push(format!("outputs[{i}]: channel and path must be non-empty"));
            }
        }

        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigValidation(problems))
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::ConfigParse(e.to_string()))
    }
}

/// Partial configuration parsed from a user file; unset fields fall back to
/// the preset defaults.
#[derive(Clone, Debug, Default, Deserialize)]
pub struct ConfigPatch {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub physics: PhysicsPatch,
    #[serde(default)]
    pub numerics: NumericsPatch,
    #[serde(default)]
    pub programmed: ProgrammedPatch,
    pub outputs: Option<Vec<OutputSpec>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct PhysicsPatch {
    pub omega_true: Option<f64>,
    pub omega_model: Option<f64>,
    pub p0: Option<f64>,
    pub p_hat: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub alpha: Option<f64>,
    pub k: Option<f64>,
    pub coupling_k: Option<f64>,
    pub drive: Option<DriveConfig>,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct NumericsPatch {
    pub grid_n: Option<usize>,
    pub domain: Option<AutoOr<[f64; 2]>>,
    pub dt: Option<AutoOr<f64>>,
    pub record_every: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct ProgrammedPatch {
    pub branch_offset: Option<f64>,
    pub branch_omega: Option<f64>,
    pub tau_c: Option<AutoOr<f64>>,
    pub p0: Option<f64>,
    pub velocity: Option<f64>,
}

impl ConfigPatch {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    /// Overlays every set field onto `base`.
    pub fn apply(&self, base: &mut ScenarioConfig) {
        if let Some(s) = &self.seed {
            base.seed = Some(*s);
        }
        let p = &self.physics;
        set(&mut base.physics.omega_true, &p.omega_true);
        set(&mut base.physics.omega_model, &p.omega_model);
        set(&mut base.physics.p0, &p.p0);
        set(&mut base.physics.p_hat, &p.p_hat);
        set(&mut base.physics.horizon, &p.horizon);
        set(&mut base.physics.alpha, &p.alpha);
        set(&mut base.physics.k, &p.k);
        set(&mut base.physics.coupling_k, &p.coupling_k);
        if p.drive.is_some() {
            base.physics.drive = p.drive;
        }
        let n = &self.numerics;
        set(&mut base.numerics.grid_n, &n.grid_n);
        set_clone(&mut base.numerics.domain, &n.domain);
        set_clone(&mut base.numerics.dt, &n.dt);
        set(&mut base.numerics.record_every, &n.record_every);
        let g = &self.programmed;
        set(&mut base.programmed.branch_offset, &g.branch_offset);
        set(&mut base.programmed.branch_omega, &g.branch_omega);
        set_clone(&mut base.programmed.tau_c, &g.tau_c);
        set(&mut base.programmed.p0, &g.p0);
        set(&mut base.programmed.velocity, &g.velocity);
        if let Some(outputs) = &self.outputs {
            base.outputs = outputs.clone();
        }
    }
}

fn set<T: Copy>(dst: &mut T, src: &Option<T>) {
    if let Some(v) = src {
        *dst = *v;
    }
}

fn set_clone<T: Clone>(dst: &mut T, src: &Option<T>) {
    if let Some(v) = src {
        *dst = v.clone();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::presets::preset_config;

    #[test]
    fn auto_fields_parse_both_ways() {
        #[derive(Deserialize)]
        struct Probe {
            dt: AutoOr<f64>,
        }
        let p: Probe = toml::from_str("dt = \"auto\"").unwrap();
        assert!(p.dt.is_auto());
        let p: Probe = toml::from_str("dt = 0.5").unwrap();
        assert_eq!(p.dt.value(), Some(&0.5));
    }

    #[test]
    fn patch_overrides_only_set_fields() {
        let mut cfg = preset_config("fig-position").unwrap();
        let patch = ConfigPatch::from_toml("seed = 9\n[physics]\np_hat = 3.0\n").unwrap();
        patch.apply(&mut cfg);
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.physics.p_hat, 3.0);
        assert_eq!(cfg.physics.p0, 1.0);
    }

    #[test]
    fn validation_lists_every_problem() {
        let mut cfg = preset_config("fig-position").unwrap();
        cfg.physics.omega_true = -1.0;
        cfg.numerics.grid_n = 100;
        cfg.numerics.record_every = 0;
        let err = cfg.validate().unwrap_err();
        match err {
            Error::ConfigValidation(problems) => {
                assert_eq!(problems.len(), 3, "{problems:?}");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = preset_config("fig-feedback").unwrap();
        let text = cfg.to_toml().unwrap();
        let patch = ConfigPatch::from_toml(&text).unwrap();
        let mut rebuilt = preset_config("fig-feedback").unwrap();
        patch.apply(&mut rebuilt);
        assert_eq!(cfg, rebuilt);
    }

    #[test]
    fn bad_auto_keyword_is_reported() {
        let mut cfg = preset_config("fig-position").unwrap();
        cfg.numerics.dt = AutoOr::Auto("later".to_string());
        assert!(cfg.validate().is_err());
    }
}
