use std::process::{Command, Output};

use serde_json::Value;

fn miocoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_miocoh")).args(args).env_remove("MIOCOH_TOL").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn measure_channel_reports_robustness() {
    let out = miocoh(&["measure-channel", "unitary:theta=0.3927"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["c_r"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-4);
    assert_eq!(v["is_mio"], Value::Bool(false));
}

#[test]
fn sampled_cohering_power_depends_only_on_seed() {
    let run = |seed: &str| json(&miocoh(&["measure-channel", "unitary:theta=0.2", "--samples", "20", "--seed", seed]));
    let (a, b) = (run("3"), run("3"));
    assert_eq!(a, b);
    let sampled = a["sampled_cohering_power_bits"].as_f64().unwrap();
    assert!(sampled <= a["cohering_power_bits"].as_f64().unwrap() + 1e-6);
}

#[test]
fn identity_costs_nothing() {
    let v = json(&miocoh(&["sim-cost", "unitary:theta=0"]));
    assert_eq!(v["sim_cost_bits"].as_f64(), Some(0.0));
    let v = json(&miocoh(&["amortized-cost", "identity:d=3"]));
    assert!(v["amortized_cost_bits"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn smoothed_cost_drops_with_error() {
    let exact = json(&miocoh(&["amortized-cost", "unitary:theta=0.785398"]));
    let loose = json(&miocoh(&["amortized-cost", "unitary:theta=0.785398", "--epsilon", "0.3"]));
    assert!((exact["amortized_cost_bits"].as_f64().unwrap() - 1.0).abs() < 1e-5);
    assert!(loose["amortized_cost_bits"].as_f64().unwrap() < 0.9);
}

#[test]
fn recycling_with_too_small_resource_exits_two() {
    let out = miocoh(&["recycle", "unitary:theta=0.3", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "infeasible");
    let out = miocoh(&["recycle", "unitary:theta=0.3", "--k", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["output_rank"].as_u64(), Some(2));
}

#[test]
fn cosbit_resource_implements_rotation() {
    let e = json(&miocoh(&["diamond-error", "unitary:theta=0.5", "cosdit:d=2"]));
    assert!(e["error"].as_f64().unwrap() < 1e-6);
    let f = json(&miocoh(&["gate-fidelity", "unitary:theta=0.5", "basis:d=2,i=0"]));
    assert!(f["fidelity"].as_f64().unwrap() < 1.0 - 1e-3);
}

#[test]
fn coherence_left_infeasible_without_resource() {
    let out = miocoh(&["coh-left", "unitary:theta=0.785", "basis:d=2,i=0", "--epsilon", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
    let out = miocoh(&["coh-left", "unitary:theta=0.3", "cosdit:d=4", "--epsilon", "0.01", "--ds", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["coherence_left"].as_f64().unwrap() > 0.0);
}

#[test]
fn flagpole_threshold_builds_operation() {
    let v = json(&miocoh(&["flagpole-threshold", "unitary:theta=0.2", "--d", "3"]));
    let p = v["threshold"].as_f64().unwrap();
    assert!((p - 1.0 / (1.0 + 0.4f64.sin())).abs() < 1e-6);
    assert!(v["residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn conversion_verdicts_and_exit_codes() {
    let yes = miocoh(&["convertible", "cosdit:d=3", "flagpole:d=3,p=0.6"]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(json(&yes)["possible"], "yes");
    let open = miocoh(&["convertible", "pure:probs=0.6;0.4", "pure:probs=0.9;0.05;0.05"]);
    assert_eq!(open.status.code(), Some(2));
    assert_eq!(json(&open)["possible"], "undetermined");
}

#[test]
fn malformed_descriptor_reports_position() {
    let out = miocoh(&["measure-channel", "unitary:thta=1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("position 8"), "{err}");
    let out = miocoh(&["measure-state", "pure:probs=0.5;x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(miocoh(&["no-such-verb"]).status.code(), Some(1));
    assert_eq!(miocoh(&["coh-left", "unitary:theta=0.1", "cosdit:d=2"]).status.code(), Some(1));
    assert_eq!(miocoh(&["--help"]).status.code(), Some(0));
}

#[test]
fn tolerance_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_miocoh"))
        .args(["sim-cost", "unitary:theta=0"])
        .env("MIOCOH_TOL", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tolerance"));
}

#[test]
fn csv_record_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.csv");
    let out = miocoh(&["measure-state", "cosdit:d=4", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    let header = rdr.headers().unwrap().clone();
    let row = rdr.records().next().unwrap().unwrap();
    let c_r = header.iter().position(|h| h == "c_r").unwrap();
    assert!((row[c_r].parse::<f64>().unwrap() - 3.0).abs() < 1e-6);
}

#[test]
fn figure_csv_gets_meta_sidecar_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, jobs) in [(&a, "1"), (&b, "3")] {
        let out = miocoh(&["figure", "fig6", "--steps", "8", "--jobs", jobs, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["figure"], "fig6");
    assert_eq!(meta["solves"].as_u64(), Some(48));
    assert!(meta["tolerances"]["tol"].as_f64().is_some());
}
