//! End-to-end tests of the binary: flag handling, exit codes, and output
//! contracts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ecsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn circuits_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../circuits")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn run_ecp1_prints_the_expected_probability() {
    let out = ecsim(&["run", "ecp1", "--alpha", "2", "--beta", "0.7071067811865476", "--json"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let expect = 1.0 / (2.0 * (1.0 + (-8.0f64).exp()));
    assert!((report["p_exact"].as_f64().unwrap() - expect).abs() < 1e-12);
    assert!((report["final_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn run_ecp2_with_thetas_reaches_unit_fidelity() {
    let out = ecsim(&[
        "run",
        "ecp2",
        "--alpha",
        "2",
        "--theta1",
        "0.7853981633974483",
        "--theta2",
        "0.7853981633974483",
        "--theta3",
        "0.5235987755982988",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((report["final_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    let p_exact = report["p_exact"].as_f64().unwrap();
    let p_formula = report["p_formula"].as_f64().unwrap();
    assert!((p_exact - p_formula).abs() < 1e-12);
}

#[test]
fn run_with_zero_beta_exits_degenerate() {
    let out = ecsim(&["run", "ecp1", "--alpha", "2", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_exit_with_usage_code() {
    let out = ecsim(&["run", "ecp1", "--alpha", "2", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    let out = ecsim(&["run", "ecp1", "--alpha", "2"]);
    assert_eq!(out.status.code(), Some(64), "missing --beta is a usage error");
    let out = ecsim(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn sweep_ecp1_writes_a_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for path in [&first, &second] {
        let out = ecsim(&[
            "sweep-ecp1",
            "--alpha",
            "0.5,1,2",
            "--steps",
            "51",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = fs::read(&first).unwrap();
    let b = fs::read(&second).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next().unwrap(), "alpha,beta,gamma,p_formula,p_exact");
    assert_eq!(text.lines().count(), 1 + 3 * 51);
}

#[test]
fn sweep_to_an_unwritable_path_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, b"not a directory").unwrap();
    let target = blocker.join("out.csv");
    let out = ecsim(&["sweep-ecp1", "--steps", "2", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(74));
}

#[test]
fn validate_passes_on_a_fresh_build() {
    let out = ecsim(&["validate", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("n3 vs gram norm"));
    assert!(text.contains("all "));

    let repeat = ecsim(&["validate", "--seed", "42"]);
    assert_eq!(stdout(&repeat), text, "same seed reproduces identical output");
}

#[test]
fn exec_runs_the_bundled_circuits() {
    for name in ["ecp1.circ", "ecp2.circ"] {
        let path = circuits_dir().join(name);
        let out = ecsim(&["exec", path.to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name} stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(stdout(&out).contains("fidelity = 1.000000000000"));
    }
}

#[test]
fn exec_missing_file_exits_66() {
    let out = ecsim(&["exec", "/no/such/file.circ"]);
    assert_eq!(out.status.code(), Some(66));
}

#[test]
fn exec_parse_error_exits_65_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.circ");
    fs::write(&path, "modes a b\nbs a q -> x y\n").unwrap();
    let out = ecsim(&["exec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(65));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("2:6"), "location missing in: {stderr}");
}

#[test]
fn exec_decoherent_discard_exits_1_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("decohere.circ");
    fs::write(&path, "modes a b\nterm 0.5 0 : 1 1\nterm 0.5 0 : 1 -1\ndiscard b\n").unwrap();
    let out = ecsim(&["exec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":4:"));
}

#[test]
fn exec_assertion_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("greedy.circ");
    let source = fs::read_to_string(circuits_dir().join("ecp1.circ")).unwrap();
    fs::write(&path, format!("{source}assert_prob_ge 0.6\n")).unwrap();
    let out = ecsim(&["exec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("assertion failed"));
}

#[test]
fn run_human_output_mentions_stages() {
    let out = ecsim(&["run", "ecp1", "--alpha", "2", "--beta", "0.6", "--gamma", "0.8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("post-selected on vacuum in d1"));
    assert!(text.contains("p_exact"));
}
