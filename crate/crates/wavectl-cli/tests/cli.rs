//! End-to-end CLI behavior through the real binary.

use std::process::Command;

fn wavectl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wavectl"))
}

#[test]
fn list_presets_names_every_preset() {
    let out = wavectl().arg("list-presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "fig-position",
        "fig-feedback",
        "coupled-correlation",
        "programmed-effective",
        "resonance-shift",
        "optimality-certificate",
        "stability-suite",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn run_preset_writes_files_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = wavectl()
        .args(["run", "--preset", "fig-position", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("PASS"));
    assert!(dir.path().join("fig-position__controlled.csv").exists());
    assert!(dir.path().join("fig-position__summary.toml").exists());
}

#[test]
fn unknown_preset_fails_and_lists_alternatives() {
    let out = wavectl()
        .args(["run", "--preset", "does-not-exist"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("fig-position"), "{text}");
}

#[test]
fn config_file_overrides_preset_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "preset = \"custom\"\n[physics]\np_hat = 2.5\nT = 4.0\n",
    )
    .unwrap();
    let out = wavectl()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--out-dir"])
        .arg(dir.path())
        .args(["--verbose"])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("p_hat = 2.5"), "{stdout}");
}

#[test]
fn run_is_byte_deterministic_for_fixed_seed() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = wavectl()
            .args([
                "run",
                "--preset",
                "optimality-certificate",
                "--seed",
                "7",
                "--quiet",
                "--out-dir",
            ])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
    }
    let name = "optimality-certificate__certificate.csv";
    let a = std::fs::read(dir_a.path().join(name)).unwrap();
    let b = std::fs::read(dir_b.path().join(name)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn check_rejects_unknown_suites() {
    let out = wavectl()
        .args(["check", "--suite", "everything"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("acceptance"), "{text}");
}

#[test]
fn check_invariants_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = wavectl()
        .args(["check", "--suite", "invariants", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("c6"), "{stdout}");
}
