//! Time series of observables recorded during an evolution.

use crate::error::{Error, Result};

/// Observables of one trajectory record. Channels a particular run did not
/// record are `NaN`.
#[derive(Clone, Copy, Debug)]
pub struct Observables {
    pub mean_x: f64,
    pub spread: f64,
    pub norm: f64,
    pub energy: f64,
}

/// Struct-of-arrays trajectory. `times`, and every non-empty channel, share
/// one length; channels a run does not produce stay empty.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub mean_x: Vec<f64>,
    pub spread: Vec<f64>,
    pub norm: Vec<f64>,
    pub energy: Vec<f64>,
    pub force_expect: Vec<f64>,
    pub cost_accum: Vec<f64>,
    pub mean_x2: Vec<f64>,
    pub covariance: Vec<f64>,
    pub mismatch_weight: Vec<f64>,
    /// Whether the potential that produced this run depends explicitly on
    /// time; energy-constancy checks are inapplicable when it does.
    pub time_dependent: bool,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_time(&self) -> Option<f64> {
        self.times.last().copied()
    }

    pub fn last_mean(&self) -> Option<f64> {
        self.mean_x.last().copied()
    }

    /// Observables at record `i`; missing channels come back as `NaN`.
    pub fn observables(&self, i: usize) -> Observables {
        let pick = |v: &Vec<f64>| v.get(i).copied().unwrap_or(f64::NAN);
        Observables {
            mean_x: pick(&self.mean_x),
            spread: pick(&self.spread),
            norm: pick(&self.norm),
            energy: pick(&self.energy),
        }
    }

    /// Restriction of the trajectory to records with `t0 <= t <= t1`.
    pub fn window(&self, t0: f64, t1: f64) -> Trajectory {
        let keep: Vec<usize> = (0..self.len())
            .filter(|&i| self.times[i] >= t0 && self.times[i] <= t1)
            .collect();
        let slice = |v: &Vec<f64>| -> Vec<f64> {
            if v.is_empty() {
                Vec::new()
            } else {
                keep.iter().map(|&i| v[i]).collect()
            }
        };
        Trajectory {
            times: slice(&self.times),
            mean_x: slice(&self.mean_x),
            spread: slice(&self.spread),
            norm: slice(&self.norm),
            energy: slice(&self.energy),
            force_expect: slice(&self.force_expect),
            cost_accum: slice(&self.cost_accum),
            mean_x2: slice(&self.mean_x2),
            covariance: slice(&self.covariance),
            mismatch_weight: slice(&self.mismatch_weight),
            time_dependent: self.time_dependent,
        }
    }

    /// Checks the structural invariants: strictly increasing times and equal
    /// lengths across all non-empty channels.
    pub fn validate(&self) -> Result<()> {
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Analysis(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        let n = self.times.len();
        let channels = [
            ("mean_x", self.mean_x.len()),
            ("spread", self.spread.len()),
            ("norm", self.norm.len()),
            ("energy", self.energy.len()),
            ("force_expect", self.force_expect.len()),
            ("cost_accum", self.cost_accum.len()),
            ("mean_x2", self.mean_x2.len()),
            ("covariance", self.covariance.len()),
            ("mismatch_weight", self.mismatch_weight.len()),
        ];
        for (name, len) in channels {
            if len != 0 && len != n {
                return Err(Error::Analysis(format!(
                    "channel {name} has {len} records, expected {n}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_catches_ragged_channels() {
        let mut t = Trajectory::new();
        t.times = vec![0.0, 1.0];
        t.mean_x = vec![0.0];
        assert!(t.validate().is_err());
        t.mean_x = vec![0.0, 0.5];
        assert!(t.validate().is_ok());
    }

    #[test]
    fn validate_requires_increasing_times() {
        let mut t = Trajectory::new();
        t.times = vec![0.0, 0.0];
        assert!(t.validate().is_err());
    }

    #[test]
    fn missing_channels_read_as_nan() {
        let mut t = Trajectory::new();
        t.times = vec![0.0];
        t.mean_x = vec![2.0];
        let obs = t.observables(0);
        assert_eq!(obs.mean_x, 2.0);
        assert!(obs.energy.is_nan());
    }
}
