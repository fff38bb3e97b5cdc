//! Black-box tests of the cbvqe binary: exit codes, determinism, golden
//! regression, and machine-output consistency.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_cbvqe")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .env_remove("CBVQE_QUBIT_CAP")
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn analyze_is_byte_deterministic() {
    let h2 = fixture("h2_sto3g_4q.json");
    let args = ["analyze", h2.to_str().unwrap()];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stderr, second.stderr);
}

#[test]
fn validate_is_byte_deterministic_per_seed() {
    let toy = fixture("toy_2q.json");
    let base = [
        "validate",
        "--shots",
        "20000",
        "--replicas",
        "300",
        "--seed",
        "11",
        toy.to_str().unwrap(),
    ];
    let first = run(&base);
    let second = run(&base);
    assert!(first.status.success(), "{}", stdout_of(&first));
    assert_eq!(first.stdout, second.stdout);

    let mut other_seed = base;
    other_seed[6] = "12";
    let third = run(&other_seed);
    assert_ne!(first.stdout, third.stdout);
}

#[test]
fn analyze_matches_golden_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("out.csv");
    let json_path = dir.path().join("out.json");
    let h2 = fixture("h2_sto3g_4q.json");
    let output = run(&[
        "analyze",
        "--csv",
        csv_path.to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
        h2.to_str().unwrap(),
    ]);
    assert!(output.status.success());

    let golden_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let golden_csv = std::fs::read_to_string(golden_dir.join("h2_analyze.csv")).unwrap();
    assert_eq!(csv, golden_csv);

    let json = std::fs::read_to_string(&json_path).unwrap();
    let golden_json = std::fs::read_to_string(golden_dir.join("h2_analyze.json")).unwrap();
    assert_eq!(json, golden_json);
}

#[test]
fn missing_file_is_an_input_error() {
    let output = run(&["analyze", "/nonexistent/ham.json"]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn malformed_json_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{not json").unwrap();
    let output = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn degenerate_ground_state_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("degenerate.json");
    std::fs::write(
        &path,
        r#"{"n_qubits":2,"label":"zz","terms":[{"pauli":"Z0 Z1","coeff":1.0}]}"#,
    )
    .unwrap();
    let output = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn classically_solved_hamiltonian_reports_zero_boosted_shots() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("diagonal.json");
    std::fs::write(
        &path,
        r#"{"n_qubits":2,"label":"diag","terms":[
            {"pauli":"Z0","coeff":1.0},{"pauli":"Z1","coeff":0.5}]}"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let output = run(&[
        "analyze",
        "--csv",
        csv.to_str().unwrap(),
        path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout_of(&output).contains("classically solved"));
    let row = std::fs::read_to_string(&csv).unwrap();
    let fields: Vec<&str> = row.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[5], "0", "M_hfvqe column");
    assert_eq!(fields[6], "inf", "speedup column");
}

#[test]
fn one_bad_file_does_not_block_the_rest() {
    let h2 = fixture("h2_sto3g_4q.json");
    let output = run(&["analyze", "/nonexistent/ham.json", h2.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout_of(&output).contains("H2/STO-3G/4q"));
}

#[test]
fn qubit_cap_env_is_honored() {
    let h2 = fixture("h2_sto3g_4q.json");
    let output = Command::new(binary())
        .args(["analyze", h2.to_str().unwrap()])
        .env("CBVQE_QUBIT_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("qubit cap"), "{stderr}");
}

#[test]
fn hf_state_flag_overrides_determinant() {
    let h2 = fixture("h2_sto3g_4q.json");
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("out.json");
    let output = run(&[
        "analyze",
        "--hf-state",
        "1100",
        "--json",
        json_path.to_str().unwrap(),
        h2.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(json[0]["hf_state"], "1100");
}

#[test]
fn sweep_rows_follow_input_order_and_are_self_consistent() {
    // Deliberately not in alphabetical or qubit order.
    let files = ["mol_6q.json", "toy_2q.json", "h2_sto3g_4q.json"];
    let paths: Vec<PathBuf> = files.iter().map(|f| fixture(f)).collect();
    let mut args = vec!["sweep"];
    args.extend(paths.iter().map(|p| p.to_str().unwrap()));
    let output = run(&args);
    assert!(output.status.success());

    let text = stdout_of(&output);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "label,n_qubits,alpha,speedup,asymptotic_ratio"
    );
    let labels: Vec<String> = lines
        .clone()
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    assert_eq!(labels, ["synthetic-mol/6q", "toy/2q", "H2/STO-3G/4q"]);

    for line in lines {
        let fields: Vec<f64> = line
            .split(',')
            .skip(2)
            .map(|x| x.parse().unwrap())
            .collect();
        let (alpha, speedup, ratio) = (fields[0], fields[1], fields[2]);
        let recomputed = speedup * (1.0 - alpha * alpha).powi(2);
        assert!(
            (ratio - recomputed).abs() <= 1e-9 * recomputed.max(1.0),
            "{line}"
        );
    }
}

#[test]
fn analyze_csv_rows_keep_input_order() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("out.csv");
    let files = ["toy_2q.json", "mol_6q.json", "h2_sto3g_4q.json"];
    let paths: Vec<PathBuf> = files.iter().map(|f| fixture(f)).collect();
    let mut args = vec!["analyze", "--csv", csv_path.to_str().unwrap()];
    args.extend(paths.iter().map(|p| p.to_str().unwrap()));
    let output = run(&args);
    assert!(output.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let labels: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(labels, ["toy/2q", "synthetic-mol/6q", "H2/STO-3G/4q"]);
}

#[test]
fn sweep_single_file_emits_single_row() {
    let toy = fixture("toy_2q.json");
    let output = run(&["sweep", toy.to_str().unwrap()]);
    assert!(output.status.success());
    assert_eq!(stdout_of(&output).lines().count(), 2);
}

#[test]
fn validate_single_replica_warns_without_verdict() {
    let toy = fixture("toy_2q.json");
    let output = run(&[
        "validate",
        "--shots",
        "1000",
        "--replicas",
        "1",
        toy.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let text = stdout_of(&output);
    assert!(text.contains("insufficient replicas"), "{text}");
    assert!(!text.contains("FAIL"));
}
