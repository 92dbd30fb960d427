//! End-to-end tests of the binary: exit codes, JSON shapes, determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tradenet"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not one JSON document: {e}\n{}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

const SAMPLE: &str = r#"{
  "agents": ["1", "2"],
  "arcs": [
    {"id": "e", "seller": "1", "buyer": "2", "capacity": 1},
    {"id": "g", "seller": "2", "buyer": "1", "capacity": 1}
  ],
  "valuations": [
    {"agent": "1", "entries": [
      {"flows": {"e": 0, "g": 0}, "value": "-1/2"},
      {"flows": {"e": 1, "g": -1}, "value": 0},
      {"flows": {"e": 1, "g": 0}, "value": -1},
      {"flows": {"e": 0, "g": -1}, "value": -1}
    ]},
    {"agent": "2", "entries": [
      {"flows": {"e": 0, "g": 0}, "value": "-1/2"},
      {"flows": {"e": -1, "g": 1}, "value": 0},
      {"flows": {"e": -1, "g": 0}, "value": -1},
      {"flows": {"e": 0, "g": 1}, "value": -1}
    ]}
  ]
}"#;

fn write_sample(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("tradenet-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn golden_run_flags_gap_and_exits_one() {
    let out = run(&["paper-example1", "--output", "json", "--recheck"]);
    assert_eq!(out.status.code(), Some(1), "gap must map to exit 1");
    let doc = stdout_json(&out);
    assert_eq!(doc["solve"]["gap"], serde_json::json!(true));
    assert_eq!(doc["solve"]["integral"]["value"], serde_json::json!(-1));
    assert_eq!(
        doc["solve"]["fractional"]["value"],
        serde_json::json!("-1/2")
    );
    assert_eq!(doc["checks"]["w1_msharp_concave"], serde_json::json!(true));
    assert_eq!(doc["checks"]["w2_msharp_concave"], serde_json::json!(true));
    let entries = doc["certify"]["Certificate"]["entries"]
        .as_array()
        .expect("certificate entries");
    assert_eq!(entries.len(), 3);
}

#[test]
fn golden_json_is_byte_identical_across_runs() {
    let a = run(&["paper-example1", "--output", "json"]);
    let b = run(&["paper-example1", "--output", "json"]);
    assert_eq!(a.stdout, b.stdout);

    let c = run(&["suite", "--suite", "thm23", "--count", "5", "--output", "json"]);
    let d = run(&["suite", "--suite", "thm23", "--count", "5", "--output", "json"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn check_subcommand_verdicts() {
    let out = run(&["check", "--function", "w1", "--property", "msharp-concave"]);
    assert_eq!(out.status.code(), Some(0));

    // The aggregate on outcome space has complements: verdict-negative.
    let out = run(&[
        "check",
        "--function",
        "aggregate",
        "--property",
        "msharp-concave",
        "--output",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc = stdout_json(&out);
    assert_eq!(doc["holds"], serde_json::json!(false));
    assert!(doc["counterexample"].is_object());

    let out = run(&["check", "--constraint", "--property", "submodular"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["check", "--function", "w1", "--property", "no-such-thing"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn extension_evaluates_the_golden_point() {
    let out = run(&[
        "extension",
        "--function",
        "aggregate",
        "--at",
        "e=1/2,g=1/2",
        "--output",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["value"], serde_json::json!("-1/2"));
    assert_eq!(doc["facet_set"].as_array().map(Vec::len), Some(2));
}

#[test]
fn validate_and_solve_instance_files() {
    let path = write_sample("sample.json", SAMPLE);
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    // No constraint: no gap, exit 0.
    let out = run(&["solve", "--instance", path.to_str().unwrap(), "--output", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["gap"], serde_json::json!(false));
    assert_eq!(doc["integral"]["value"], serde_json::json!(0));

    // Prices at the full-trade optimum exist without a constraint.
    let out = run(&[
        "prices",
        "--instance",
        path.to_str().unwrap(),
        "--outcome",
        "e=1,g=1",
        "--output",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["found"], serde_json::json!(true));

    let broken = write_sample(
        "broken.json",
        &SAMPLE.replace(r#"{"flows": {"e": 1, "g": -1}, "value": 0}"#, ""),
    );
    let out = run(&["validate", broken.to_str().unwrap(), "--output", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let doc = stdout_json(&out);
    assert!(doc["error"].is_string());
}

#[test]
fn prices_subcommand_refutes_with_certificate() {
    let out = run(&[
        "prices",
        "--outcome",
        "e=0,g=0",
        "--rents",
        "--recheck",
        "--output",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc = stdout_json(&out);
    assert_eq!(doc["found"], serde_json::json!(false));
    assert!(doc["certificate"]["Lp"]["farkas"].is_object());
}

#[test]
fn certify_subcommand_exit_codes() {
    // Built-in golden instance: no equilibrium.
    let out = run(&["certify", "--recheck"]);
    assert_eq!(out.status.code(), Some(1));

    // Unconstrained sample: equilibrium exists.
    let path = write_sample("sample2.json", SAMPLE);
    let out = run(&["certify", "--instance", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn suite_subcommand_runs_and_reports() {
    let out = run(&[
        "suite", "--suite", "thm31", "--count", "4", "--seed", "7", "--output", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc[0]["passed"], serde_json::json!(true));
    assert_eq!(doc[0]["cases"], serde_json::json!(4));
}

#[test]
fn generate_subcommand_is_deterministic() {
    let a = run(&["generate", "--profile", "two-sided-separable", "--seed", "3", "--output", "json"]);
    let b = run(&["generate", "--profile", "two-sided-separable", "--seed", "3", "--output", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    // A generated instance document round-trips through validate.
    let path = write_sample("generated.json", &String::from_utf8(a.stdout).unwrap());
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["prices", "--outcome", "e=0"]); // missing g
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}
