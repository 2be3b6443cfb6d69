//! End-to-end tests of the command-line surface: documented workflows,
//! output shapes, and the exit-code contract (0 success, 1 usage, 2 file
//! problems, 3 failed checks, 4 numerical failures).

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algebroid")).args(args).output().unwrap()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn assert_code(out: &Output, code: i32, context: &str) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "{context}\nstdout: {}\nstderr: {}",
        stdout_of(out),
        stderr_of(out)
    );
}

fn path_str(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn export_then_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bicocycle.toml");
    let out = run(&["scenarios", "--export", "so3xso3-bicocycle", "--out", path_str(&spec)]);
    assert_code(&out, 0, "export");
    assert!(stdout_of(&out).contains("wrote"));

    let out = run(&["verify", path_str(&spec)]);
    assert_code(&out, 0, "verify");
    let text = stdout_of(&out);
    assert!(text.contains("skew"), "missing check line: {text}");
    assert!(text.contains("anchor_morphism"), "missing check line: {text}");
    assert!(text.contains("jacobi"), "missing check line: {text}");
    assert!(text.contains("nonzero blocks:"), "missing block summary: {text}");
    assert!(text.contains("leibniz compatibility:"), "missing leibniz line: {text}");
    assert!(text.trim_end().ends_with("PASS"), "missing verdict: {text}");
}

#[test]
fn verify_json_is_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("rigid.toml");
    run(&["scenarios", "--export", "so3-rigid-body", "--out", path_str(&spec)]);
    let out = run(&["verify", path_str(&spec), "--json"]);
    assert_code(&out, 0, "verify --json");
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    for check in checks {
        assert!(check["max_residual"].as_f64().unwrap() < 1e-9);
        assert_eq!(check["pass"], serde_json::Value::Bool(true));
    }
}

#[test]
fn product_and_decompose_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let split = dir.path().join("heavy-top.toml");
    let total = dir.path().join("heavy-top-total.toml");
    let resplit = dir.path().join("heavy-top-again.toml");
    run(&["scenarios", "--export", "se3-heavy-top", "--out", path_str(&split)]);

    let out = run(&["product", path_str(&split), "--out", path_str(&total)]);
    assert_code(&out, 0, "product");

    let out = run(&[
        "decompose",
        path_str(&total),
        "--split",
        "3",
        "--out",
        path_str(&resplit),
    ]);
    assert_code(&out, 0, "decompose");
    assert!(
        stdout_of(&out).contains("classification: semidirect"),
        "heavy top should classify as a semidirect product: {}",
        stdout_of(&out)
    );
    assert_eq!(
        std::fs::read(&split).unwrap(),
        std::fs::read(&resplit).unwrap(),
        "decompose should reproduce the original split file byte-for-byte"
    );
}

#[test]
fn simulate_then_invariants_passes() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("rigid.csv");
    let out = run(&[
        "simulate",
        "--scenario",
        "so3-rigid-body",
        "--t1",
        "100",
        "--out",
        path_str(&traj),
    ]);
    assert_code(&out, 0, "simulate");
    let header = std::fs::read_to_string(&traj).unwrap();
    assert!(header.starts_with("t,y1,y2,y3,H,C1\n"), "unexpected header: {header}");

    let out = run(&["invariants", path_str(&traj), "--system", "so3-rigid-body"]);
    assert_code(&out, 0, "invariants");
    let text = stdout_of(&out);
    assert!(text.contains("energy drift:"), "missing drift line: {text}");
    assert!(text.contains("casimir |y|^2:"), "missing casimir line: {text}");
    assert!(text.trim_end().ends_with("PASS"), "missing verdict: {text}");

    let out = run(&["invariants", path_str(&traj), "--system", "so3-rigid-body", "--json"]);
    assert_code(&out, 0, "invariants --json");
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert!(report["energy_drift"].as_f64().unwrap() < 1e-8);
}

#[test]
fn simulate_spec_file_with_explicit_flags() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("rigid.toml");
    let traj = dir.path().join("rigid.csv");
    run(&["scenarios", "--export", "so3-rigid-body", "--out", path_str(&spec)]);
    let out = run(&[
        "simulate",
        path_str(&spec),
        "--dynamics",
        "lie-poisson",
        "--energy",
        "(y1^2 + y2^2 + y3^2)/2",
        "--state",
        "1,2,3",
        "--t1",
        "1",
        "--out",
        path_str(&traj),
    ]);
    assert_code(&out, 0, "simulate spec file");
    let text = std::fs::read_to_string(&traj).unwrap();
    assert!(text.starts_with("t,y1,y2,y3,H\n"), "unexpected header: {text}");
}

#[test]
fn simulate_batch_writes_numbered_files() {
    let dir = tempfile::tempdir().unwrap();
    let states = dir.path().join("states.txt");
    let traj = dir.path().join("batch.csv");
    std::fs::write(&states, "1,0.01,0.01\n0.5,0.2,0.1\n").unwrap();
    let out = run(&[
        "simulate",
        "--scenario",
        "so3-rigid-body",
        "--states-file",
        path_str(&states),
        "--t1",
        "1",
        "--out",
        path_str(&traj),
    ]);
    assert_code(&out, 0, "simulate batch");
    assert!(dir.path().join("batch-001.csv").exists());
    assert!(dir.path().join("batch-002.csv").exists());
    assert!(!traj.exists(), "batch output should only use numbered names");
}

#[test]
fn scenarios_listing_names_all_eight() {
    let out = run(&["scenarios"]);
    assert_code(&out, 0, "scenarios");
    let text = stdout_of(&out);
    for name in [
        "tangent-R2",
        "so3-rigid-body",
        "se3-heavy-top",
        "heisenberg-cocycle",
        "sl2-zeta-split",
        "so3xso3-bicocycle",
        "contact-damped-oscillator",
        "so3-ep-herglotz",
    ] {
        assert!(text.contains(name), "listing is missing {name}: {text}");
    }
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify"]);
    assert_code(&out, 1, "missing positional");

    let csv = dir.path().join("t.csv");
    let out = run(&["simulate", "--scenario", "so2-rigid-body", "--out", path_str(&csv)]);
    assert_code(&out, 1, "unknown scenario");
    assert!(stderr_of(&out).contains("unknown scenario"));

    let out = run(&[
        "simulate",
        "--scenario",
        "so3-rigid-body",
        "--dynamics",
        "sympletic",
        "--out",
        path_str(&csv),
    ]);
    assert_code(&out, 1, "unknown family");

    let out = run(&[
        "simulate",
        "--scenario",
        "so3-rigid-body",
        "--method",
        "rk4",
        "--out",
        path_str(&dir.path().join("t.csv")),
    ]);
    assert_code(&out, 1, "rk4 without --dt");
    assert!(stderr_of(&out).contains("--dt is required"));

    let out = run(&[
        "simulate",
        "--scenario",
        "so3-rigid-body",
        "--method",
        "rk4",
        "--dt",
        "0.001",
        "--rtol",
        "1e-6",
        "--out",
        path_str(&dir.path().join("t.csv")),
    ]);
    assert_code(&out, 1, "rk4 with --rtol");
}

#[test]
fn file_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", path_str(&dir.path().join("missing.toml"))]);
    assert_code(&out, 2, "missing file");

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "version = \"1\"\nkind = \"algebroid\"\nn = 0\nk = 2\nfoo = 3\n")
        .unwrap();
    let out = run(&["verify", path_str(&bad)]);
    assert_code(&out, 2, "unknown field");

    let algebroid = dir.path().join("rigid.toml");
    run(&["scenarios", "--export", "so3-rigid-body", "--out", path_str(&algebroid)]);
    let out = run(&["product", path_str(&algebroid), "--out", path_str(&dir.path().join("t.toml"))]);
    assert_code(&out, 2, "product on a total spec");
}

#[test]
fn failed_verification_exits_3() {
    // Anchor fields that do not close under the zero bracket: the anchor
    // morphism residual is exactly 1 at every sample point.
    let dir = tempfile::tempdir().unwrap();
    let twisted = dir.path().join("twisted.toml");
    std::fs::write(
        &twisted,
        "version = \"1\"\nkind = \"algebroid\"\nn = 2\nk = 2\n\n\
         [[anchor]]\nrow = 1\ncol = 1\nexpr = \"1\"\n\n\
         [[anchor]]\nrow = 2\ncol = 1\nexpr = \"x1\"\n\n\
         [[anchor]]\nrow = 2\ncol = 2\nexpr = \"1\"\n",
    )
    .unwrap();
    let out = run(&["verify", path_str(&twisted)]);
    assert_code(&out, 3, "twisted anchor");
    let text = stdout_of(&out);
    assert!(text.contains("anchor_morphism"), "missing check name: {text}");
    assert!(text.trim_end().ends_with("FAIL"), "missing verdict: {text}");
}

#[test]
fn invariants_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("tangent.csv");
    run(&[
        "simulate",
        "--scenario",
        "tangent-R2",
        "--t1",
        "1",
        "--out",
        path_str(&traj),
    ]);
    let out = run(&["invariants", path_str(&traj), "--system", "so3-rigid-body"]);
    assert_code(&out, 2, "trajectory dims do not match the system");
}

#[test]
fn numerical_failures_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "simulate",
        "--scenario",
        "so3-rigid-body",
        "--dynamics",
        "euler-lagrange",
        "--energy",
        "y1",
        "--out",
        path_str(&dir.path().join("t.csv")),
    ]);
    assert_code(&out, 4, "degenerate Lagrangian");
    assert!(stderr_of(&out).contains("singular Lagrangian"), "{}", stderr_of(&out));
}
