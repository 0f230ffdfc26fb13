use std::path::PathBuf;
use std::process::{Command, Output};

fn regmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regmod")).args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sat_prints_model_and_log() {
    let out = regmod(&["solve", &fixture("even_odd_plus.smt2")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("Searching for a counterexample with 1 state\nSearching for a model with 1 state\n"));
    assert!(text.contains("S(2) -> 1") || text.contains("S(1) -> 2"));
    assert!(text.trim_end().ends_with("tree automaton with 2 states"));
}

#[test]
fn unsat_exit_code_and_derivation() {
    let out = regmod(&["solve", &fixture("even_unsat.smt2")]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("Failure! Clauses are unsatisfiable."));
    assert!(text.contains("Derivation:"));
}

#[test]
fn unknown_when_bound_runs_out() {
    let out = regmod(&["solve", &fixture("diagonal.smt2"), "--max-states", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("Unknown:"));
}

#[test]
fn json_output() {
    let out = regmod(&["solve", &fixture("list_length.smt2"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"], "sat");
    assert_eq!(v["states_per_sort"][1][0], "list");
    assert!(v["log"]["events"].as_array().unwrap().len() >= 2);
}

#[test]
fn emit_asp_writes_one_pair_per_bound() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_string_lossy().into_owned();
    let out = regmod(&["solve", &fixture("even_odd_plus.smt2"), "--max-states", "2", "--no-symmetry-breaking", "--emit-asp", &d]);
    assert_eq!(out.status.code(), Some(0));
    let golden: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", "even_odd_plus_2.lp"].iter().collect();
    assert_eq!(
        std::fs::read_to_string(dir.path().join("model_2.lp")).unwrap(),
        std::fs::read_to_string(golden).unwrap()
    );
    assert!(dir.path().join("counterexample_1.lp").exists());
    assert!(!dir.path().join("model_3.lp").exists());
}

#[test]
fn gen_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("mr.smt2");
    let f = file.to_string_lossy().into_owned();
    assert_eq!(regmod(&["gen", "member-rev", "2", "-o", &f]).status.code(), Some(0));
    let out = regmod(&["solve", &f]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("(elt: 2, list: 4)"));
}

#[test]
fn error_exit_codes() {
    assert_eq!(regmod(&["solve"]).status.code(), Some(64));
    assert_eq!(regmod(&["solve", &fixture("even_odd_plus.smt2"), "--max-states", "0"]).status.code(), Some(64));
    assert_eq!(regmod(&["solve", "/nonexistent.smt2"]).status.code(), Some(65));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.smt2");
    std::fs::write(&bad, "(assert (p x))").unwrap();
    let out = regmod(&["solve", &bad.to_string_lossy()]);
    assert_eq!(out.status.code(), Some(65));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.smt2:"));
    let out = regmod(&["solve", &fixture("even_odd_plus.smt2"), "--backend", "asp", "--solver-path", "/nonexistent/clingo"]);
    assert_eq!(out.status.code(), Some(69));
    let out = regmod(&["solve", &fixture("even_odd_plus.smt2"), "--count-models"]);
    assert_eq!(out.status.code(), Some(64));
}
