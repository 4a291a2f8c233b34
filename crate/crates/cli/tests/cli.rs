//! End-to-end tests of the `fixtcp` binary: exit codes, output files and
//! determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn assets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets")
}

fn fixtcp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fixtcp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = fixtcp(args);
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn plan_passes_on_bundled_part() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = run(&[
        "plan",
        "--config",
        assets().join("config.json").to_str().unwrap(),
        "--input",
        assets().join("rounded_rectangle.csv").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("result: PASS"));
    for f in ["trajectory.csv", "profile.csv", "report.json"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
}

#[test]
fn plan_then_validate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config = assets().join("config.json");
    let (code, _, _) = run(&[
        "plan",
        "--config",
        config.to_str().unwrap(),
        "--input",
        assets().join("rounded_rectangle.csv").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (code, stdout, _) = run(&[
        "validate",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "3",
        "--input",
        dir.path().join("trajectory.csv").to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stdout: {stdout}");
    assert!(stdout.contains("PASS"));
}

#[test]
fn plan_is_deterministic() {
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let (code, _, _) = run(&[
            "plan",
            "--config",
            assets().join("config.json").to_str().unwrap(),
            "--input",
            assets().join("rounded_rectangle.csv").to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        outputs.push((
            std::fs::read(dir.path().join("trajectory.csv")).unwrap(),
            std::fs::read(dir.path().join("report.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1], "repeated runs must be byte-identical");
}

#[test]
fn fit_writes_readable_curve() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(&[
        "fit",
        "--input",
        assets().join("rounded_rectangle.csv").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let curve = fixtcp_core::io::read_curve_json(&dir.path().join("curve.json")).unwrap();
    assert!(curve.evaluate(0.5).is_ok());
}

#[test]
fn frames_and_transform_write_csvs() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, file) in [("frames", "frames.csv"), ("transform", "robot_path.csv")] {
        let (code, _, _) = run(&[
            cmd,
            "--input",
            assets().join("rounded_rectangle.csv").to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{cmd} failed");
        let text = std::fs::read_to_string(dir.path().join(file)).unwrap();
        assert!(text.lines().count() > 100, "{file} too short");
    }
}

#[test]
fn underdetermined_config_exits_2_and_names_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    // More control points than input points.
    let mut cfg: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(assets().join("config.json")).unwrap(),
    )
    .unwrap();
    cfg["num_ctrl"] = 5000.into();
    let cfg_path = dir.path().join("bad_config.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();

    let (code, _, stderr) = run(&[
        "plan",
        "--config",
        cfg_path.to_str().unwrap(),
        "--input",
        assets().join("rounded_rectangle.csv").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "stderr: {stderr}");
    assert!(stderr.to_lowercase().contains("underdetermined"), "stderr: {stderr}");
}

#[test]
fn missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run(&[
        "plan",
        "--input",
        "/nonexistent/points.csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 2, "stderr: {stderr}");
}
