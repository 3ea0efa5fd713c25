//! Scenario-layer behavior: preset registry, determinism of emitted files,
//! and config round-trips.

use wavectl::scenario::{
    list_presets, preset_config, run_scenario, ConfigPatch, ScenarioConfig,
};

#[test]
fn registry_contains_the_documented_presets() {
    let presets = list_presets();
    for expected in [
        "fig-position",
        "fig-feedback",
        "coupled-correlation",
        "programmed-effective",
        "resonance-shift",
        "optimality-certificate",
        "stability-suite",
    ] {
        assert!(
            presets.iter().any(|(n, _)| *n == expected),
            "missing preset {expected}"
        );
    }
    for (name, description) in &presets {
        assert!(!description.is_empty(), "{name} has no description");
    }
}

#[test]
fn unknown_preset_names_the_available_ones() {
    let err = preset_config("fig-positron").unwrap_err();
    let text = err.to_string();
    assert!(text.contains("fig-positron"));
    assert!(text.contains("fig-position"));
}

#[test]
fn identical_config_and_seed_produce_byte_identical_files() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let config = preset_config("optimality-certificate").unwrap();
    run_scenario(&config, dir_a.path()).unwrap();
    run_scenario(&config, dir_b.path()).unwrap();

    let mut names: Vec<String> = std::fs::read_dir(dir_a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        let a = std::fs::read(dir_a.path().join(&name)).unwrap();
        let b = std::fs::read(dir_b.path().join(&name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn resolved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = preset_config("fig-position").unwrap();
    let first = run_scenario(&config, dir.path()).unwrap();
    // No "auto" left in the resolved config.
    assert!(first.resolved.numerics.dt.value().is_some());
    assert!(first.resolved.numerics.domain.value().is_some());

    // Round-trip the resolved config through TOML and run again.
    let text = first.resolved.to_toml().unwrap();
    let patch = ConfigPatch::from_toml(&text).unwrap();
    let mut rebuilt = preset_config("fig-position").unwrap();
    patch.apply(&mut rebuilt);
    assert_eq!(first.resolved, rebuilt);

    let dir2 = tempfile::tempdir().unwrap();
    let second = run_scenario(&rebuilt, dir2.path()).unwrap();
    for (key, value) in &first.finals {
        let other = second.finals[key];
        assert_eq!(
            *value, other,
            "final {key} changed between original and round-tripped run"
        );
    }
}

#[test]
fn outputs_limit_emission_to_requested_channels() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = preset_config("fig-position").unwrap();
    config.outputs = vec![wavectl::scenario::OutputSpec {
        channel: "controlled".to_string(),
        path: "only.csv".to_string(),
    }];
    let summary = run_scenario(&config, dir.path()).unwrap();
    assert_eq!(summary.outputs.len(), 1);
    assert!(dir.path().join("only.csv").exists());
    assert!(!dir.path().join("fig-position__uncontrolled.csv").exists());
}

#[test]
fn validation_failure_lists_fields_and_blocks_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = preset_config("fig-position").unwrap();
    config.physics.horizon = -1.0;
    config.numerics.grid_n = 37;
    let err = run_scenario(&config, dir.path()).unwrap_err();
    let text = err.to_string();
    assert!(text.contains("physics.T"));
    assert!(text.contains("numerics.grid_n"));
}

#[test]
fn summary_records_every_check_and_the_resolved_values() {
    let dir = tempfile::tempdir().unwrap();
    let config = preset_config("fig-position").unwrap();
    let summary = run_scenario(&config, dir.path()).unwrap();
    assert_eq!(summary.checks.len(), 4);
    assert!(summary.all_passed);
    let toml_text = std::fs::read_to_string(dir.path().join("fig-position__summary.toml")).unwrap();
    assert!(toml_text.contains("resolved"));
    assert!(toml_text.contains("checks"));
    // A custom scenario config parsed from scratch also runs.
    let patch = ConfigPatch::from_toml(
        "preset = \"custom\"\n[physics]\np_hat = 2.0\nT = 3.0\n",
    )
    .unwrap();
    let mut custom: ScenarioConfig = preset_config("custom").unwrap();
    patch.apply(&mut custom);
    let summary = run_scenario(&custom, dir.path()).unwrap();
    assert!((summary.finals["endpoint"] - 2.0).abs() < 0.02);
}
