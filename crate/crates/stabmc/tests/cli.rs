//! End-to-end checks of the command-line surface: verbs, flags, exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stabmc"))
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stabmc_cli_{name}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn presets_list_and_show() {
    let out = bin().args(["presets", "list"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["poisson-sanity", "rgg-vertex-edge", "entropy-limit", "knn-probe"] {
        assert!(text.contains(name), "missing preset {name} in:\n{text}");
    }
    let out = bin().args(["presets", "show", "poisson-sanity"]).output().unwrap();
    assert!(out.status.success());
    let toml_text = String::from_utf8(out.stdout).unwrap();
    assert!(toml_text.contains("s_grid"));
    // The printed preset is itself a valid config.
    let dir = tmpdir("show");
    let path = dir.join("preset.toml");
    fs::write(&path, &toml_text).unwrap();
    let out = bin().args(["validate", path.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn run_validate_export_round_trip() {
    let dir = tmpdir("run");
    let config_path = dir.join("exp.toml");
    // Start from the shown preset, shrink, and redirect the output.
    let shown = bin().args(["presets", "show", "rgg-vertex-edge"]).output().unwrap();
    let mut text = String::from_utf8(shown.stdout).unwrap();
    text = text.replace("reps_per_s = 400", "reps_per_s = 10");
    fs::write(&config_path, &text).unwrap();

    let out_dir = dir.join("bundle");
    let out = bin()
        .args([
            "run",
            config_path.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--parallelism",
            "2",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("manifest.json").exists());
    assert!(out_dir.join("gap_curve.csv").exists());
    assert!(out_dir.join("rate_report.csv").exists());

    let exported = dir.join("plot.csv");
    let out = bin()
        .args([
            "export",
            out_dir.to_str().unwrap(),
            "--curves",
            "gap_0_1",
            "--out",
            exported.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&exported).unwrap();
    assert!(text.starts_with("curve,s,value,stderr"));
    assert_eq!(text.lines().count(), 1 + 7);
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn validation_failures_exit_one() {
    let dir = tmpdir("badcfg");
    // Test function identically zero: the statistic would vanish.
    let bad = r#"
master_seed = 1
s_grid = [100.0]
reps_per_s = 10

[window]
dim = 2
lo = [0.0, 0.0]
hi = [1.0, 1.0]
boundary = "hard"

[window.density]
kind = "constant"
value = 1.0

[[statistics]]
[statistics.score]
family = "unit"

[statistics.region]
kind = "all"

[statistics.testfn]
kind = "constant"
value = 0.0
"#;
    let path = dir.join("bad.toml");
    fs::write(&path, bad).unwrap();
    let out = bin().args(["validate", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("identically zero"), "{err}");

    // Region outside the window.
    let bad2 = bad.replace(
        "kind = \"all\"",
        "kind = \"box\"\nlo = [0.5, 0.5]\nhi = [1.5, 1.0]",
    )
    .replace("value = 0.0", "value = 1.0");
    let path2 = dir.join("bad2.toml");
    fs::write(&path2, bad2).unwrap();
    let out = bin().args(["validate", path2.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside the window"));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn runtime_failures_exit_two() {
    let out = bin().args(["export", "/nonexistent/bundle", "--curves", "dk"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_command_exits_one() {
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
