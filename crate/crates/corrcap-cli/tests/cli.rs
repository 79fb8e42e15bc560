//! End-to-end tests of the `corrcap` binary: output formats, file formats,
//! exit codes, and stdout determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use corrcap::io::{DistributionDoc, MarginalSetDoc, StateDoc};
use corrcap::qstate::{CVector, Complex64, DensityMatrix, PureState};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_corrcap"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .env_remove("CORRCAP_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn write_distribution(dir: &Path, name: &str, probs: &[f64]) -> PathBuf {
    let path = dir.join(name);
    let doc = DistributionDoc { probs: probs.to_vec() };
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    path
}

fn diag_state(populations: &[f64]) -> DensityMatrix {
    DensityMatrix::from_diagonal(populations, vec![populations.len()]).unwrap()
}

fn bell_state() -> DensityMatrix {
    let mut v = CVector::zeros(4);
    v[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[3] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState::new(v, vec![2, 2]).unwrap().to_density()
}

fn write_state(dir: &Path, name: &str, state: &DensityMatrix) -> PathBuf {
    let path = dir.join(name);
    let doc = StateDoc::from_state(state);
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    path
}

#[test]
fn major_cmp_prints_order_token() {
    let dir = tempfile::tempdir().unwrap();
    write_distribution(dir.path(), "a.json", &[0.5, 0.5]);
    write_distribution(dir.path(), "b.json", &[0.7, 0.3]);
    let out = run_in(dir.path(), &["major", "cmp", "a.json", "b.json"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "MAJORIZED_BY\n");

    let out = run_in(dir.path(), &["major", "cmp", "b.json", "a.json"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "MAJORIZES\n");
}

#[test]
fn major_inf_and_sup_match_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    write_distribution(dir.path(), "a.json", &[0.5, 0.5, 0.0]);
    write_distribution(dir.path(), "b.json", &[0.6, 0.2, 0.2]);
    let out = run_in(dir.path(), &["major", "inf", "a.json", "b.json"]);
    let json = stdout_json(&out);
    assert_eq!(json["probs"], serde_json::json!([0.5, 0.3, 0.2]));

    write_distribution(dir.path(), "c.json", &[0.6, 0.15, 0.15, 0.10]);
    write_distribution(dir.path(), "d.json", &[0.5, 0.25, 0.25, 0.0]);
    let out = run_in(dir.path(), &["major", "sup", "c.json", "d.json"]);
    let json = stdout_json(&out);
    assert_eq!(json["probs"], serde_json::json!([0.6, 0.2, 0.2, 0.0]));
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), "not json").unwrap();
    write_distribution(dir.path(), "a.json", &[0.5, 0.5]);
    let out = run_in(dir.path(), &["major", "cmp", "bad.json", "a.json"]);
    assert_eq!(out.status.code(), Some(2));

    let missing = run_in(dir.path(), &["major", "inf", "nope.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let not_a_distribution = dir.path().join("off.json");
    fs::write(&not_a_distribution, r#"{"probs": [0.5, 0.6]}"#).unwrap();
    let out = run_in(dir.path(), &["major", "cmp", "off.json", "a.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn composite_build_reports_and_writes_state() {
    let dir = tempfile::tempdir().unwrap();
    let doc = MarginalSetDoc::from_states(&[diag_state(&[0.65, 0.35]), diag_state(&[0.5, 0.5])]);
    fs::write(dir.path().join("marg.json"), serde_json::to_string(&doc).unwrap()).unwrap();

    let out = run_in(
        dir.path(),
        &["composite", "build", "marg.json", "-o", "sigma.state"],
    );
    let json = stdout_json(&out);
    let spectrum = json["spectrum"].as_array().unwrap();
    assert!((spectrum[0].as_f64().unwrap() - 0.5).abs() < 1e-8);
    assert!((spectrum[1].as_f64().unwrap() - 0.5).abs() < 1e-8);
    assert!(spectrum[2].as_f64().unwrap().abs() < 1e-8);
    assert!((json["correlation_bits"].as_f64().unwrap() - 0.934068).abs() < 1e-5);
    assert!(json["gram_offdiag_max"].as_f64().unwrap() < 1e-8);
    assert_eq!(json["two_qubit_ppt"], Value::Bool(true));

    // The written state analyzes to the same report fields.
    let out = run_in(dir.path(), &["state", "analyze", "sigma.state"]);
    let again = stdout_json(&out);
    assert_eq!(again["correlation_bits"], json["correlation_bits"]);
    assert_eq!(again["spectrum"], json["spectrum"]);
}

#[test]
fn composite_build_three_isospectral_marginals() {
    let dir = tempfile::tempdir().unwrap();
    let m = diag_state(&[0.65, 0.35]);
    let doc = MarginalSetDoc::from_states(&[m.clone(), m.clone(), m]);
    fs::write(dir.path().join("marg3.json"), serde_json::to_string(&doc).unwrap()).unwrap();
    let out = run_in(dir.path(), &["composite", "build", "marg3.json"]);
    let json = stdout_json(&out);
    assert!((json["correlation_bits"].as_f64().unwrap() - 1.868136).abs() < 1e-5);
}

#[test]
fn analyze_bell_and_product_states() {
    let dir = tempfile::tempdir().unwrap();
    write_state(dir.path(), "bell.json", &bell_state());
    let out = run_in(dir.path(), &["state", "analyze", "bell.json"]);
    let json = stdout_json(&out);
    assert!((json["correlation_bits"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(json["is_classical"], Value::Bool(false));
    assert_eq!(json["two_qubit_ppt"], Value::Bool(false));

    let product = DensityMatrix::tensor(&[diag_state(&[0.8, 0.2]), diag_state(&[0.6, 0.4])]);
    write_state(dir.path(), "product.json", &product);
    let out = run_in(dir.path(), &["state", "analyze", "product.json"]);
    let json = stdout_json(&out);
    assert!(json["correlation_bits"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(json["is_classical"], Value::Bool(true));
}

#[test]
fn analyze_classical_optimum_is_flagged_classical() {
    let dir = tempfile::tempdir().unwrap();
    let pair = corrcap::QubitPair::new(0.65, 0.5).unwrap();
    write_state(
        dir.path(),
        "classical.json",
        &corrcap::twoqubit::sigma_classical(&pair),
    );
    let out = run_in(dir.path(), &["state", "analyze", "classical.json"]);
    let json = stdout_json(&out);
    assert_eq!(json["is_classical"], Value::Bool(true));
    assert_eq!(json["two_qubit_ppt"], Value::Bool(true));
    assert!((json["correlation_bits"].as_f64().unwrap() - 0.493422).abs() < 1e-5);
}

#[test]
fn twoqubit_optimal_entangled_isospectral_is_pure() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "twoqubit", "optimal", "--pa", "0.65", "--pb", "0.65", "--family", "entangled",
            "-o", "state.json",
        ],
    );
    let json = stdout_json(&out);
    let spectrum = json["spectrum"].as_array().unwrap();
    assert!((spectrum[0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(json["two_qubit_ppt"], Value::Bool(false));
    assert!(dir.path().join("state.json").exists());
}

#[test]
fn twoqubit_rejects_out_of_range_probability() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["twoqubit", "optimal", "--pa", "0.4", "--pb", "0.6", "--family", "separable"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fig1_csv_has_reference_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["twoqubit", "fig1", "--pa", "0.65", "-o", "fig1.csv"],
    );
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "p_b,C_classical,C_separable,C_entangled");
    assert_eq!(csv.lines().count(), 202);
    let row: Vec<f64> = csv
        .lines()
        .find(|l| l.starts_with("0.5,"))
        .expect("p_b = 0.5 row")
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((row[1] - 0.493422).abs() < 1e-5);
    assert!((row[2] - 0.934068).abs() < 1e-5);
    assert!((row[3] - 1.324229).abs() < 1e-5);
}

#[test]
fn feline_prints_both_capacities() {
    let dir = tempfile::tempdir().unwrap();
    write_distribution(dir.path(), "spectrum.json", &[0.65, 0.35]);
    let out = run_in(
        dir.path(),
        &["twoqubit", "feline", "--n", "3", "--spectrum", "spectrum.json"],
    );
    let json = stdout_json(&out);
    assert!((json["c_pure"].as_f64().unwrap() - 2.802204).abs() < 1e-5);
    assert!((json["c_decohered"].as_f64().unwrap() - 1.868136).abs() < 1e-5);
}

#[test]
fn verify_suites_exit_zero_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["verify", "--suite", "lattice-oracle", "--parallel"]);
    let json = stdout_json(&out);
    assert_eq!(json["failures"], serde_json::json!(0));
    assert_eq!(json["trials"], serde_json::json!(6579));

    let out = run_in(
        dir.path(),
        &["--seed", "7", "verify", "--suite", "nielsen-kempe", "--trials", "100"],
    );
    let json = stdout_json(&out);
    assert_eq!(json["failures"], serde_json::json!(0));
    assert_eq!(json["suite"], serde_json::json!("nielsen-kempe"));
}

#[test]
fn verify_rejects_unknown_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["verify", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_seeds_give_identical_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--deterministic", "--seed", "7",
        "verify", "--suite", "hierarchy", "--trials", "50", "--parallel",
    ];
    let a = run_in(dir.path(), &args);
    let b = run_in(dir.path(), &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn seed_env_variable_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .current_dir(dir.path())
        .env("CORRCAP_SEED", "42")
        .args(["--deterministic", "verify", "--suite", "corollary3", "--trials", "5"])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let config: Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).lines().next().unwrap())
            .expect("config echo is JSON");
    assert_eq!(config["seed"], serde_json::json!(42));
    assert!(config.get("timestamp").is_none());
}
