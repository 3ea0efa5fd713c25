//! Command-line entry point: run scenarios, list presets, run check suites.
//!
//! Exit code is 0 only when every attached check passes.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use wavectl::scenario::{list_presets, preset_config, run_scenario, ConfigPatch};
use wavectl::suite::{available_suites, run_suite};

#[derive(Parser)]
#[command(name = "wavectl", version, about = "Wave-packet control simulator")]
struct Cli {
    /// Print only the final verdict.
    #[arg(long, global = true, conflicts_with = "verbose")]
    quiet: bool,

    /// Print full summaries including resolved configs.
    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a config file and/or a named preset.
    Run(RunArgs),
    /// List the available presets.
    ListPresets,
    /// Run a named check suite (see `--suite`).
    Check(CheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML scenario config; fields override the preset defaults.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Preset name (overrides the `preset` field of the config file).
    #[arg(long)]
    preset: Option<String>,

    /// Directory for emitted data files and the summary.
    #[arg(long, default_value = "wavectl-out")]
    out_dir: PathBuf,

    /// Seed override for randomized scenarios.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CheckArgs {
    /// Suite name: "acceptance" or "invariants".
    #[arg(long)]
    suite: String,

    /// Directory for the scenario files the suite emits.
    #[arg(long, default_value = "wavectl-out")]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Run(args) => cmd_run(cli, args),
        Command::ListPresets => {
            for (name, description) in list_presets() {
                println!("{name:22} {description}");
            }
            Ok(true)
        }
        Command::Check(args) => cmd_check(cli, args),
    }
}

fn cmd_run(cli: &Cli, args: &RunArgs) -> Result<bool> {
    let patch = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            ConfigPatch::from_toml(&text)?
        }
        None => ConfigPatch::default(),
    };
    let preset_name = args
        .preset
        .clone()
        .or_else(|| patch.preset.clone())
        .unwrap_or_else(|| {
            if args.config.is_none() {
                String::new()
            } else {
                "custom".to_string()
            }
        });
    if preset_name.is_empty() {
        bail!("nothing to run: pass --preset and/or --config");
    }
    let mut config = preset_config(&preset_name)?;
    patch.apply(&mut config);
    config.preset = preset_name;
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }

    let summary = run_scenario(&config, &args.out_dir)?;
    if cli.verbose {
        println!("{}", summary.to_toml());
    } else if !cli.quiet {
        print!("{}", summary.render_text());
    } else {
        println!(
            "{}: {}",
            summary.scenario,
            if summary.all_passed { "PASS" } else { "FAIL" }
        );
    }
    Ok(summary.all_passed)
}

fn cmd_check(cli: &Cli, args: &CheckArgs) -> Result<bool> {
    if !available_suites().contains(&args.suite.as_str()) {
        bail!(
            "unknown suite '{}'; available: {}",
            args.suite,
            available_suites().join(", ")
        );
    }
    let report = run_suite(&args.suite, &args.out_dir)?;
    if cli.quiet {
        for c in &report.criteria {
            println!("{}", c.render_line());
        }
    } else {
        print!("{}", report.render_text());
    }
    Ok(report.all_passed())
}
