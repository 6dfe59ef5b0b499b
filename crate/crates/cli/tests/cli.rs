// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermicomm"))
        .args(args)
        .env_remove("FERMICOMM_MAX_QUBITS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn dir_entries(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    names
}

#[test]
fn dims_example() {
    let v = json(&run(&["dims", "--group", "gauss", "--t", "2", "--n", "5"]));
    assert_eq!(v["result"]["dim"], "22");
    assert_eq!(v["result"]["dim_num"], "22");
    assert_eq!(v["result"]["dim_den"], "1");
    assert!(v["result"]["formula"].as_str().unwrap().contains("prod"));
    assert_eq!(v["provenance"]["tool"], "fermicomm");
    assert_eq!(v["provenance"]["config"]["subcommand"], "dims");
}

#[test]
fn dims_stays_exact_beyond_64_bits() {
    let v = json(&run(&["dims", "--group", "gauss", "--t", "10", "--n", "12"]));
    assert_eq!(v["result"]["dim"], "10513054800772678214722379520");
}

#[test]
fn dims_with_oracle() {
    let v = json(&run(&["dims", "--group", "pp", "--t", "2", "--n", "2", "--oracle"]));
    assert_eq!(v["result"]["oracle"]["brute_force"], 20);
    assert_eq!(v["result"]["oracle"]["match"], true);
}

#[test]
fn oracle_subcommand() {
    let v = json(&run(&["oracle", "--group", "gauss", "--t", "3", "--n", "1"]));
    assert_eq!(v["result"]["brute_force"], 20);
    assert_eq!(v["result"]["closed_form"], "20");
    assert_eq!(v["result"]["match"], true);
    assert_eq!(code(&run(&["oracle", "--group", "pp", "--t", "2", "--n", "4"])), 3);
}

#[test]
fn verify_example() {
    let v = json(&run(&["verify", "--group", "pp", "--t", "2", "--n", "2", "--samples", "20", "--seed", "1"]));
    let worst = v["result"]["max_residual"].as_f64().unwrap();
    assert!(worst < 1e-9);
    assert!(v["result"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert_eq!(v["provenance"]["seed"], 1);
}

#[test]
fn verify_with_basis() {
    let v = json(&run(&[
        "verify",
        "--group",
        "gauss",
        "--t",
        "2",
        "--n",
        "2",
        "--samples",
        "3",
        "--seed",
        "4",
        "--include-basis",
    ]));
    let checks = v["result"]["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["identity"].as_str().unwrap().contains("basis")));
    assert!(checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn magic_exact_example() {
    let v = json(&run(&["magic", "exact", "--ensemble", "gauss", "--n", "3"]));
    assert_eq!(v["result"]["exact"], "1/14");
    assert_eq!(v["result"]["exact_num"], "1");
    assert_eq!(v["result"]["exact_den"], "14");
    assert!(v["result"]["exact_decimal"].as_str().unwrap().starts_with("0.0714285714"));
    let v = json(&run(&["magic", "exact", "--ensemble", "pp", "--r", "0", "--n", "3"]));
    assert_eq!(v["result"]["exact"], "1/8");
}

#[test]
fn magic_mc_reports_estimate() {
    let v = json(&run(&["magic", "mc", "--ensemble", "gauss", "--n", "2", "--samples", "500", "--seed", "7"]));
    let mc = &v["result"]["mc"];
    assert_eq!(mc["samples"], 500);
    assert_eq!(mc["seed"], 7);
    assert!(mc["stderr"].as_f64().unwrap() > 0.0);
    assert!(v["result"]["sigmas_from_exact"].as_f64().unwrap() < 4.0);
}

#[test]
fn basis_manifest() {
    let v = json(&run(&["basis", "--group", "pp", "--t", "2", "--n", "1"]));
    assert_eq!(v["result"]["count"], 6);
    assert_eq!(v["result"]["expected_dim"], "6");
    assert_eq!(v["result"]["elements"].as_array().unwrap().len(), 6);
}

#[test]
fn invariants_of_state_specs() {
    let v = json(&run(&["invariants", "--n", "3", "--state", "slater:1,3"]));
    assert_eq!(v["result"]["plucker_rank"], 1);
    assert_eq!(v["result"]["particle_number"], 2);
    let v = json(&run(&["invariants", "--n", "2", "--state", "gaussian:seed=3"]));
    assert!(v["result"]["gaussian_witness"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["provenance"]["seed"], 3);
    for spec in ["vacuum", "fock:0110", "pp-gaussian:seed=1,r=2", "random:seed=2,r=2", "random:seed=2"] {
        json(&run(&["invariants", "--n", "4", "--state", spec]));
    }
}

#[test]
fn invariants_from_a_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.json");
    let h = 0.5f64.sqrt();
    std::fs::write(&path, format!("[[{h}, 0], [0, 0], [0, 0], [0, {h}]]")).unwrap();
    let spec = format!("file:{}", path.display());
    let v = json(&run(&["invariants", "--n", "2", "--state", &spec]));
    assert!(v["result"]["gaussian_witness"].as_f64().unwrap() < 1e-9);
    std::fs::write(&path, "[[1, 0], [1, 0], [0, 0], [0, 0]]").unwrap();
    assert_eq!(code(&run(&["invariants", "--n", "2", "--state", &spec])), 2);
    std::fs::write(&path, "[[1, 0]]").unwrap();
    assert_eq!(code(&run(&["invariants", "--n", "2", "--state", &spec])), 2);
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["dims", "--group", "unitary", "--t", "2", "--n", "2"],
        &["dims", "--group", "gauss", "--t", "0", "--n", "2"],
        &["verify", "--group", "pp", "--t", "2", "--n", "2"],
        &["magic", "exact", "--ensemble", "pp", "--n", "3"],
        &["magic", "exact", "--ensemble", "gauss", "--r", "1", "--n", "3"],
        &["magic", "exact", "--ensemble", "clifford", "--n", "3"],
        &["magic", "mc", "--ensemble", "gauss", "--n", "2", "--samples", "10", "--seed", "1"],
        &["invariants", "--n", "2", "--state", "slater:5"],
        &["invariants", "--n", "2", "--state", "gaussian:sed=1"],
        &["basis", "--group", "pp", "--t", "3", "--n", "1"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn resource_caps_exit_three() {
    assert_eq!(code(&run(&["verify", "--group", "gauss", "--t", "3", "--n", "9", "--seed", "1"])), 3);
    assert_eq!(code(&run(&["--max-qubits", "3", "verify", "--group", "pp", "--t", "2", "--n", "2", "--seed", "1"])), 3);
    assert_eq!(code(&run(&["--max-operator-dim", "100", "basis", "--group", "pp", "--t", "2", "--n", "2"])), 3);
    let out = Command::new(env!("CARGO_BIN_EXE_fermicomm"))
        .args(["verify", "--group", "pp", "--t", "2", "--n", "2", "--seed", "1"])
        .env("FERMICOMM_MAX_QUBITS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn csv_output() {
    let out = run(&["--format", "csv", "dims", "--group", "gauss", "--t", "2", "--n", "5"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("key,value"));
    assert!(text.lines().any(|l| l == "result.dim,22"));
    assert!(text.lines().any(|l| l == "provenance.config.subcommand,dims"));
}

#[test]
fn output_file_is_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let p = path.to_str().unwrap();
    let out = run(&["--output", p, "dims", "--group", "pp", "--t", "2", "--n", "3"]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["dim"], "50");
    assert_eq!(dir_entries(dir.path()), ["out.json"]);

    let failed = dir.path().join("failed.json");
    let f = failed.to_str().unwrap();
    assert_eq!(code(&run(&["--output", f, "verify", "--group", "gauss", "--t", "3", "--n", "9", "--seed", "1"])), 3);
    assert_eq!(code(&run(&["--output", f, "dims", "--group", "gauss", "--t", "0", "--n", "1"])), 2);
    assert_eq!(dir_entries(dir.path()), ["out.json"]);
}

#[test]
fn plot_data_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plot.csv");
    let p = path.to_str().unwrap();
    let args = [
        "magic",
        "mc",
        "--ensemble",
        "pp",
        "--r",
        "2",
        "--n",
        "4",
        "--samples",
        "200",
        "--seed",
        "3",
        "--emit-plot-data",
        p,
    ];
    let v = json(&run(&args));
    assert_eq!(v["result"]["plot_data"], p);
    let mut reader = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["n", "r", "exact", "mc_mean", "mc_stderr", "samples", "seed"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let ns: Vec<&str> = rows.iter().map(|r| &r[0]).collect();
    assert_eq!(ns, ["2", "3", "4"]);
    assert!(rows.iter().all(|r| &r[1] == "2" && &r[5] == "200" && &r[6] == "3"));
    assert_eq!(rows[0][2].parse::<f64>().unwrap(), 0.25);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["magic", "mc", "--ensemble", "gauss", "--n", "3", "--samples", "300", "--seed", "11"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["invariants", "--n", "3", "--state", "random:seed=5,r=1"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
