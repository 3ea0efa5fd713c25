//! Declarative scenario runs: configuration, named presets, deterministic
//! data emission, and run summaries.
//!
//! Identical configuration plus seed produces byte-identical data files on
//! the same build; the summary additionally carries wall time, which is the
//! one field allowed to differ between runs.

pub mod config;
pub mod csv;
pub mod presets;
pub mod summary;

use std::path::Path;
use std::time::Instant;

use crate::error::{Error, Result};

pub use config::{AutoOr, ConfigPatch, DriveConfig, OutputSpec, ScenarioConfig};
pub use presets::{list_presets, preset_config, preset_names};
pub use summary::{CheckResult, RunSummary};

use presets::RunCtx;

/// Validates and executes one scenario, writing trajectory files and a
/// `<preset>__summary.toml` under `out_dir`.
pub fn run_scenario(config: &ScenarioConfig, out_dir: &Path) -> Result<RunSummary> {
    config.validate()?;
    if !preset_names().contains(&config.preset) {
        return Err(Error::UnknownPreset {
            name: config.preset.clone(),
            available: preset_names(),
        });
    }
    std::fs::create_dir_all(out_dir)?;

    let started = Instant::now();
    let mut resolved = config.clone();
    let mut ctx = RunCtx::new(config, out_dir);
    match resolved.preset.as_str() {
        "fig-position" => presets::run_fig_position(&mut resolved, &mut ctx)?,
        "fig-feedback" => presets::run_fig_feedback(&mut resolved, &mut ctx)?,
        "coupled-correlation" => presets::run_coupled_correlation(&mut resolved, &mut ctx)?,
        "programmed-effective" => presets::run_programmed_effective(&mut resolved, &mut ctx)?,
        "resonance-shift" => presets::run_resonance_shift(&mut resolved, &mut ctx)?,
        "optimality-certificate" => presets::run_optimality_certificate(&mut resolved, &mut ctx)?,
        "stability-suite" => presets::run_stability_suite(&mut resolved, &mut ctx)?,
        "custom" => presets::run_custom(&mut resolved, &mut ctx)?,
        other => {
            return Err(Error::UnknownPreset {
                name: other.to_string(),
                available: preset_names(),
            })
        }
    }

    let mut summary = RunSummary::new(resolved);
    for check in ctx.checks {
        summary.push_check(check);
    }
    summary.finals = ctx.finals;
    summary.outputs = ctx.outputs;
    summary.wall_secs = started.elapsed().as_secs_f64();
    let summary_path = out_dir.join(format!("{}__summary.toml", summary.scenario));
    csv::write_text(&summary_path, &summary.to_toml())?;
    Ok(summary)
}
