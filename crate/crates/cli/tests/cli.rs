use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn riffle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riffle")).args(args).env_remove("RIFFLE_THREADS").output().expect("run riffle")
}

fn stdout(args: &[&str]) -> String {
    let out = riffle(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn validated(command: &str, args: &[&str]) -> Value {
    let text = stdout(args);
    let value: Value = serde_json::from_str(&text).unwrap();
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_dir().join(format!("{command}.schema.json"))).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?}: {errors:?}");
    value
}

#[test]
fn json_outputs_match_their_schemas() {
    validated("group", &["group", "--type", "H3", "--format", "json"]);
    let m = validated("measure", &["measure", "descent", "--type", "B3", "--x", "3", "--format", "json"]);
    assert_eq!(m["result"]["entries"].as_array().unwrap().len(), 48);
    validated("measure", &["measure", "hyperplane", "--type", "G2", "--symbolic", "--format", "json"]);
    let c = validated("measure", &["measure", "cellini", "--type", "C2", "--k", "3", "--format", "json"]);
    assert!(c["result"]["entries"][0]["cdes"].is_array());
    validated("arrangement", &["arrangement", "--type", "A3", "--x", "1/2", "--format", "json"]);
    validated("spectrum", &["spectrum", "walk", "--type", "G2", "--x", "2", "--check", "--format", "json"]);
    validated("spectrum", &["spectrum", "descent", "--type", "A3", "--x", "2", "--format", "json"]);
    let v = validated("verify", &["verify", "endpoints", "--type", "F4", "--format", "json"]);
    assert!(v["result"]["results"].as_array().unwrap().iter().all(|r| r["status"] == "pass"));
    let s = validated(
        "simulate",
        &["simulate", "--model", "gsr", "--n", "4", "--trials", "2000", "--seed", "5", "--compare", "exact", "--format", "json"],
    );
    let total: u64 = s["result"]["counts"].as_array().unwrap().iter().map(|r| r["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 2000);
    validated("compare", &["compare", "--type", "C3", "--x", "3", "--format", "json"]);
}

#[test]
fn g2_descent_table_is_keyed_by_descent_count() {
    let out = stdout(&["measure", "descent", "--type", "G2", "--x", "2", "--format", "table"]);
    assert!(out.starts_with("# measure"));
    let rows: Vec<Vec<&str>> = out.lines().skip(2).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows, vec![vec!["0", "1", "7/16"], vec!["1", "10", "1/16"], vec!["2", "1", "-1/16"]]);
}

#[test]
fn verify_agree_prints_pass() {
    let out = stdout(&["verify", "agree", "--type", "B", "--rank", "3", "--symbolic"]);
    assert!(out.contains("H=M: PASS"), "{out}");
}

#[test]
fn compare_reports_coincidence_in_type_c() {
    let out = stdout(&["compare", "--type", "C2", "--x", "3", "--format", "csv"]);
    for pair in ["M,H,true,0/1", "M,x_3,true,0/1", "H,x_3,true,0/1"] {
        assert!(out.contains(pair), "{out}");
    }
    let d4 = stdout(&["compare", "--type", "D4", "--x", "3", "--format", "csv"]);
    assert!(d4.contains("M,H,false"), "{d4}");
}

#[test]
fn simulate_is_reproducible_and_reports_tv() {
    let args = ["simulate", "--model", "typec", "--n", "3", "--trials", "50000", "--seed", "9", "--format", "csv"];
    let a = stdout(&args);
    let b = stdout(&args);
    assert_eq!(a, b);
    let threads = riffle(&["--threads", "1", "simulate", "--model", "typec", "--n", "3", "--trials", "50000", "--seed", "9", "--format", "csv"]);
    assert_eq!(String::from_utf8(threads.stdout).unwrap(), a);
    let t = stdout(&["simulate", "--model", "x2", "--n", "4", "--trials", "20000", "--seed", "3", "--compare", "exact"]);
    let line = t.lines().find(|l| l.starts_with("TV distance")).expect("tv line");
    let tv: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(tv < 0.05, "{line}");
}

#[test]
fn json_is_byte_identical_across_runs() {
    let args = ["verify", "cellini", "--type", "B3", "--k", "1,3", "--format", "json"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn arrangement_from_file() {
    let dir = std::env::temp_dir().join(format!("riffle-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("lines.json");
    std::fs::write(
        &path,
        r#"{"dim": 2, "hyperplanes": [{"normal": [1, 0]}, {"normal": [0, 1]}, {"normal": [1, 1], "offset": 1}]}"#,
    )
    .unwrap();
    let file = path.to_str().unwrap();
    let v = validated("arrangement", &["arrangement", "--file", file, "--format", "json"]);
    assert_eq!(v["result"]["chambers"], 7);
    assert_eq!(v["result"]["central"], false);
    let s = stdout(&["spectrum", "walk", "--file", file, "--x", "2", "--check"]);
    assert!(s.contains("confirmed"), "{s}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| riffle(args).status.code().unwrap();
    assert_eq!(code(&["measure", "descent", "--type", "Z3", "--x", "2"]), 2);
    assert_eq!(code(&["measure", "descent", "--type", "A2", "--x", "two"]), 2);
    assert_eq!(code(&["measure", "cellini", "--type", "H3", "--k", "2"]), 2);
    assert_eq!(code(&["simulate", "--model", "gsr", "--n", "3", "--trials", "0"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["arrangement", "--file", "/nonexistent/riffle.json"]), 1);
    assert_eq!(code(&["--help"]), 0);
    let err = riffle(&["measure", "descent", "--type", "Z3", "--x", "2"]);
    let msg = String::from_utf8(err.stderr).unwrap();
    assert!(msg.starts_with("error: ") && msg.lines().count() == 1, "{msg}");
}
