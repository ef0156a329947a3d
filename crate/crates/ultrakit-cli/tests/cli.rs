//! End-to-end checks of the batch front end: document parsing, exit codes,
//! witnesses, and the determinism contract.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ultrakit"))
}

fn write_docs(dir: &std::path::Path) -> (PathBuf, PathBuf, PathBuf) {
    let sierpinski = dir.join("sierpinski.space");
    std::fs::write(&sierpinski, "points: 2\nopens: [[],[1],[0,1]]\n").unwrap();
    let point = dir.join("point.space");
    std::fs::write(&point, "points: 1\nopens: [[],[0]]\n").unwrap();
    let collapse = dir.join("collapse.map");
    std::fs::write(&collapse, "map: [0,0]\n").unwrap();
    (sierpinski, point, collapse)
}

#[test]
fn etale_counterexample_exits_one_with_witness() {
    let dir = std::env::temp_dir().join("ultrakit-cli-etale");
    std::fs::create_dir_all(&dir).unwrap();
    let (sierpinski, point, collapse) = write_docs(&dir);
    let output = bin()
        .args(["etale"])
        .arg(&sierpinski)
        .arg(&point)
        .arg(&collapse)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("FAIL"), "{stdout}");
    assert!(stdout.contains("lifts"), "{stdout}");
}

#[test]
fn validate_space_exits_zero() {
    let dir = std::env::temp_dir().join("ultrakit-cli-validate");
    std::fs::create_dir_all(&dir).unwrap();
    let (sierpinski, _, _) = write_docs(&dir);
    let output = bin().args(["validate"]).arg(&sierpinski).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn malformed_document_exits_two() {
    let dir = std::env::temp_dir().join("ultrakit-cli-malformed");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.space");
    std::fs::write(&bad, "points: two\nopens: [[]]\n").unwrap();
    let output = bin()
        .args(["etale"])
        .arg(&bad)
        .arg(&bad)
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn coherence_reports_are_byte_identical_per_seed() {
    let run = || {
        bin()
            .args([
                "coherence",
                "--seed",
                "42",
                "--instances",
                "10",
                "--format",
                "json",
            ])
            .output()
            .unwrap()
    };
    let first = run();
    let second = run();
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn reconstruct_small_passes() {
    let output = bin()
        .args([
            "reconstruct",
            "--max-points",
            "2",
            "--fiber-bound",
            "2",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.lines().all(|l| l.contains("\"pass\"")), "{stdout}");
}

#[test]
fn env_bounds_apply_and_flags_win() {
    // The env var shrinks the sweep; an explicit flag overrides it.
    let with_env = bin()
        .args(["reconstruct", "--format", "json"])
        .env("ULTRAKIT_BOUNDS", "max-points=1;fiber-bound=1")
        .output()
        .unwrap();
    assert_eq!(with_env.status.code(), Some(0));
    let lines_env = String::from_utf8(with_env.stdout).unwrap().lines().count();
    let with_flag = bin()
        .args(["reconstruct", "--max-points", "2", "--format", "json"])
        .env("ULTRAKIT_BOUNDS", "max-points=1;fiber-bound=1")
        .output()
        .unwrap();
    assert_eq!(with_flag.status.code(), Some(0));
    let lines_flag = String::from_utf8(with_flag.stdout).unwrap().lines().count();
    assert!(lines_flag > lines_env);
}

#[test]
fn convergence_example() {
    let dir = std::env::temp_dir().join("ultrakit-cli-cvg");
    std::fs::create_dir_all(&dir).unwrap();
    let (sierpinski, _, _) = write_docs(&dir);
    // The alternating family converges to both points of the Sierpiński
    // space under the factorial atom.
    for point in ["0", "1"] {
        let output = bin()
            .args(["convergence"])
            .arg(&sierpinski)
            .args(["--point", point, "--uf", "factorial", "--pattern", "1,0"])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "point {point}");
    }
    // In the discrete space the same family converges only to 0.
    let discrete = dir.join("discrete.space");
    std::fs::write(&discrete, "points: 2\nopens: [[],[0],[1],[0,1]]\n").unwrap();
    let output = bin()
        .args(["convergence"])
        .arg(&discrete)
        .args(["--point", "1", "--uf", "factorial", "--pattern", "0,1"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}
