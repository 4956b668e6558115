//! End-to-end checks of the command-line interface and its exit codes.

use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pachner33"))
}

#[test]
fn passing_run_exits_zero_with_json_on_stdout() {
    let out = binary()
        .args(["--trials", "2", "--checks", "boundary,transport", "--quiet"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.get("config").is_some());
    assert!(report.get("trials").is_some());
    assert!(report.get("summary").is_some());
    assert_eq!(report["summary"]["all_passed"], serde_json::json!(true));
}

#[test]
fn zero_trials_is_a_usage_error() {
    let out = binary()
        .args(["--trials", "0", "--quiet"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_check_is_a_usage_error() {
    let out = binary()
        .args(["--checks", "boundary,nonsense", "--quiet"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsense"));
}

#[test]
fn malformed_perturb_delta_is_a_usage_error() {
    let out = binary()
        .args(["--perturb-delta", "1/0", "--quiet"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn same_seed_gives_byte_identical_report_files() {
    let dir = std::env::temp_dir();
    let a = dir.join("pachner33_cli_a.json");
    let b = dir.join("pachner33_cli_b.json");
    for path in [&a, &b] {
        let status = binary()
            .args([
                "--seed",
                "7",
                "--trials",
                "2",
                "--checks",
                "boundary,euclidean",
                "--quiet",
                "--report",
            ])
            .arg(path)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b);
    let _ = std::fs::remove_file(a);
    let _ = std::fs::remove_file(b);
}
