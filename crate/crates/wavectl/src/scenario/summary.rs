//! Run summaries: resolved parameters, final observables, and the verdict of
//! every attached check.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::scenario::config::ScenarioConfig;

/// One named check with its measured value.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub detail: String,
}

impl CheckResult {
    pub fn new(
        name: impl Into<String>,
        passed: bool,
        measured: f64,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            passed,
            measured,
            detail: detail.into(),
        }
    }

    /// Check that `measured` is within `tol` of `expected`.
    pub fn close_to(
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        tol: f64,
    ) -> Self {
        let err = (measured - expected).abs();
        Self::new(
            name,
            err <= tol,
            measured,
            format!("|{measured:.6} - {expected:.6}| = {err:.3e}, tolerance {tol:.1e}"),
        )
    }

    /// Check that `measured` stays below `bound`.
    pub fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(
            name,
            measured < bound,
            measured,
            format!("{measured:.6e} < {bound:.1e}"),
        )
    }
}

/// One emitted output file.
#[derive(Clone, Debug, Serialize)]
pub struct OutputRecord {
    pub channel: String,
    pub path: String,
}

/// Everything one scenario run produced, summary-side.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub all_passed: bool,
    pub wall_secs: f64,
    pub finals: BTreeMap<String, f64>,
    pub checks: Vec<CheckResult>,
    pub outputs: Vec<OutputRecord>,
    /// The fully resolved configuration (no `"auto"` left), sufficient to
    /// reproduce the run.
    pub resolved: ScenarioConfig,
}

impl RunSummary {
    pub fn new(resolved: ScenarioConfig) -> Self {
        Self {
            scenario: resolved.preset.clone(),
            all_passed: true,
            wall_secs: 0.0,
            finals: BTreeMap::new(),
            checks: Vec::new(),
            outputs: Vec::new(),
            resolved,
        }
    }

    pub fn push_check(&mut self, check: CheckResult) {
        self.all_passed &= check.passed;
        self.checks.push(check);
    }

    pub fn record_final(&mut self, name: impl Into<String>, value: f64) {
        self.finals.insert(name.into(), value);
    }

    pub fn record_output(&mut self, channel: impl Into<String>, path: impl Into<String>) {
        self.outputs.push(OutputRecord {
            channel: channel.into(),
            path: path.into(),
        });
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).unwrap_or_else(|e| format!("# serialization error: {e}"))
    }

    /// Plain-text rendering for the terminal.
    pub fn render_text(&self) -> String {
        let mut out = format!("scenario: {}\n", self.scenario);
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {}: {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        for (k, v) in &self.finals {
            out.push_str(&format!("  final {k} = {v:.9}\n"));
        }
        for o in &self.outputs {
            out.push_str(&format!("  wrote {} -> {}\n", o.channel, o.path));
        }
        out.push_str(&format!(
            "  result: {} ({:.2}s)\n",
            if self.all_passed { "PASS" } else { "FAIL" },
            self.wall_secs
        ));
        out
    }
}
