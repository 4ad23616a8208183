use std::path::Path;
use std::process::{Command, Output, Stdio};
use std::io::Write;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orbitlab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn error_kind(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"]["kind"].as_str().unwrap().to_string()
}

fn without_metadata(mut v: Value) -> String {
    v.as_object_mut().unwrap().remove("metadata");
    serde_json::to_string_pretty(&v).unwrap()
}

const SYM2_SL2: &str = r#"{"kind":"sym2","group":{"family":"special_linear","field":"complex","size":2}}"#;

#[test]
fn example_pipeline_reports_the_stabilizer_and_verdicts() {
    let out = run(&["experiment", "--scenario", "example1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["summary"]["stabilizer_dim"], 1);
    assert_eq!(v["summary"]["h_orbit_status"], "non_closed");
    assert_eq!(v["summary"]["g_orbit_status"], "closed");
    assert_eq!(v["kind"], "example1");
    for key in ["config", "trials", "summary", "tolerances", "metadata"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    // defaulted tolerances are echoed
    assert!(v["config"]["flow"]["moment_tolerance"].is_number());
    assert!(v["tolerances"]["rank"].is_number());
}

#[test]
fn zero_vector_is_closed() {
    let input = format!(r#"{{"representation":{SYM2_SL2},"vector":[[0,0],[0,0]]}}"#);
    let out = run_stdin(&["closedness"], &input);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"]["status"], "closed");
}

#[test]
fn nilpotent_form_is_not_closed_and_file_input_works() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("point.json");
    std::fs::write(&path, format!(r#"{{"representation":{SYM2_SL2},"vector":[[1,0],[0,0]]}}"#)).unwrap();
    let out = run(&["closedness", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"]["status"], "non_closed");
    assert!(v["flow"]["max_iterations"].is_number());
}

#[test]
fn flags_override_input_tolerances() {
    let input = format!(r#"{{"representation":{SYM2_SL2},"vector":[[1,0],[0,1]]}}"#);
    let out = run_stdin(&["minimal", "--moment-tol", "1e-3", "--rank-tol", "1e-7", "--max-iters", "50"], &input);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["minimal"], true);
    assert_eq!(v["threshold"], 1e-3);
    assert_eq!(v["tolerances"]["rank"], 1e-7);
}

#[test]
fn point_subcommands_produce_consistent_dimensions() {
    let input = format!(r#"{{"representation":{SYM2_SL2},"vector":[[1,0],[0,1]]}}"#);
    let od = json(&run_stdin(&["orbit-dim"], &input));
    let st = json(&run_stdin(&["stabilizer"], &input));
    assert_eq!(od["orbit"]["dim"], 2);
    assert_eq!(st["dim"], 1);
    let red = run_stdin(&["reductive"], &input);
    assert_eq!(red.status.code(), Some(0));
    let red = json(&red);
    assert_eq!(red["source"], "stabilizer");
    assert_eq!(red["report"]["verdict"], "reductive");
}

#[test]
fn reductive_accepts_a_basis() {
    // span{E12}: nilpotent, not reductive
    let input = r#"{"basis":{"field":"complex","ambient_size":2,"matrices":[[[0,1],[0,0]]]}}"#;
    let out = run_stdin(&["reductive"], input);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["report"]["verdict"], "not_reductive");
    assert_eq!(v["report"]["witnesses"][0]["kind"], "nilpotent_center");
}

#[test]
fn zero_trials_is_a_config_error() {
    let out = run(&["experiment", "--scenario", "example1", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "config");
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_flags_and_bad_input_are_rejected() {
    let out = run(&["experiment", "--scenario", "example1", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");

    let out = run(&[]);
    assert_eq!(out.status.code(), Some(2));

    let out = run_stdin(&["closedness"], "{not json");
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "parse");

    let wrong_shape = format!(r#"{{"representation":{SYM2_SL2},"vector":[[1,0,0],[0,1,0]]}}"#);
    let out = run_stdin(&["closedness"], &wrong_shape);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["closedness", "/nonexistent/input.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "io");

    let out = run(&["experiment", "--scenario", "example1", "--kind", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_and_version_exit_cleanly() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn catalog_lists_scenarios() {
    let out = run(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = json(&out)
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap().to_string())
        .collect();
    assert!(names.contains(&"example1".to_string()));
    assert!(names.contains(&"sl2-real-complex".to_string()));
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let args = ["experiment", "--scenario", "sym2-sum", "--trials", "12", "--seed", "5"];
    let one = run(&[&args[..], &["--workers", "1"]].concat());
    let three = run(&[&args[..], &["--workers", "3"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(three.status.code(), Some(0));
    assert_eq!(json(&three)["metadata"]["workers"], 3);
    assert_eq!(without_metadata(json(&one)), without_metadata(json(&three)));
}

#[test]
fn csv_goes_next_to_the_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "experiment", "--scenario", "sl2-real-complex", "--trials", "6", "--format", "csv", "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["trials"].as_array().unwrap().len(), 6);
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("index,seed,status"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn csv_is_only_for_experiments() {
    let input = format!(r#"{{"representation":{SYM2_SL2},"vector":[[1,0],[0,1]]}}"#);
    let out = run_stdin(&["closedness", "--format", "csv"], &input);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    let base = run(&["experiment", "--scenario", "normal-factor", "--trials", "3"]);
    let mut config = json(&base)["config"].clone();
    config["scenario"] = Value::String("normal-factor".into());
    config["seed"] = Value::from(11);
    std::fs::write(&path, serde_json::to_string(&config).unwrap()).unwrap();

    let from_file = json(&run(&["experiment", "--config", path.to_str().unwrap()]));
    assert_eq!(from_file["config"]["seed"], 11);
    assert_eq!(from_file["config"]["trials"], 3);
    let overridden = json(&run(&["experiment", "--config", path.to_str().unwrap(), "--trials", "2"]));
    assert_eq!(overridden["config"]["trials"], 2);
    assert_eq!(overridden["trials"].as_array().unwrap().len(), 2);
}

#[test]
fn output_path_receives_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("nested.json");
    let out = run(&["catalog", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(Path::new(&out_path).exists());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!(v.as_array().unwrap().len() >= 5);
}
