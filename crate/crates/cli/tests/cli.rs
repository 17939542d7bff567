use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn switchlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_switchlab"))
        .args(args)
        .env_remove("SWITCHLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = switchlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("elapsed_ms");
    v
}

fn temp_file(name: &str, contents: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn scs_examples() {
    let v = json(&["scs", "ABCD", "BADC", "CBDA", "DACB", "--check", "ACBADACDB"]);
    assert_eq!(v["command"], "scs");
    assert_eq!(v["results"]["length"], 9);
    assert_eq!(v["results"]["check"]["valid"], true);
    assert_eq!(v["results"]["queries"]["gap"], 5);
    assert!(v["elapsed_ms"].is_u64());
    assert_eq!(json(&["scs", "ABCD"])["results"]["length"], 4);
}

#[test]
fn scs_census() {
    let v = json(&["scs", "--census"]);
    assert_eq!(v["results"]["histogram"], serde_json::json!({"6": 37, "7": 946, "8": 779, "9": 9}));
    assert_eq!(v["results"]["total"], 1771);
}

#[test]
fn malformed_permutations_exit_2() {
    for args in [&["scs", "ABCE"][..], &["scs", "ABCD", "ABC"], &["scs", "AABC"], &["scs"]] {
        assert_eq!(switchlab(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn enumerate_examples() {
    let v = json(&["enumerate", "--gates", "G", "--perms", "sigma-star", "--matrix", "M4"]);
    assert_eq!(v["results"]["census"]["total"], 460);
    assert_eq!(v["results"]["census"]["per_column"], serde_json::json!([316, 60, 42, 42]));
    assert_eq!(json(&["enumerate", "--gates", "identity-only"])["results"]["census"]["total"], 1);
    let c = json(&["enumerate", "--gates", "G", "--classes"]);
    assert_eq!(c["results"]["classes"]["count"], 98);
    assert_eq!(c["results"]["classes"]["every_merge_verified"], true);
    let sylvester = json(&["enumerate", "--matrix", "sylvester"]);
    assert!(sylvester["results"]["census"]["total"].is_u64());
}

#[test]
fn enumerate_unknown_preset_exits_2() {
    assert_eq!(switchlab(&["enumerate", "--gates", "nope"]).status.code(), Some(2));
    assert_eq!(switchlab(&["enumerate", "--matrix", "M5"]).status.code(), Some(2));
    assert_eq!(switchlab(&["enumerate", "--perms", "ABCD,ABCD"]).status.code(), Some(2));
}

#[test]
fn enumerate_from_files() {
    let gates = temp_file(
        "gates.json",
        r#"[{"name": "I", "matrix": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}, {"name": "Xm", "matrix": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}, "Z"]"#,
    );
    let perms = temp_file("perms.json", r#"["ABCD", "BADC", "CBDA", "DACB"]"#);
    let matrix = temp_file("m4.json", "[[1,1,1,1],[1,1,-1,-1],[1,-1,-1,1],[1,-1,1,-1]]");
    let from_files = json(&["enumerate", "--gates", &gates, "--perms", &perms, "--matrix", &matrix]);
    let preset_gates = temp_file("gates_named.json", r#"{"gates": ["1", "X", "Z"]}"#);
    let named = json(&["enumerate", "--gates", &preset_gates]);
    assert_eq!(from_files["results"], named["results"]);
    let bad = temp_file("bad.json", r#"[{"name": "N", "matrix": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]}]"#);
    assert_eq!(switchlab(&["enumerate", "--gates", &bad]).status.code(), Some(2));
}

#[test]
fn run_examples() {
    let v = json(&["run", "--table", "1", "--column", "2"]);
    assert_eq!(v["results"]["decoded_y"], 2);
    assert!((v["results"]["success_probability"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v = json(&["run", "--table", "2", "--column", "0", "--gamma", "0"]);
    assert!((v["results"]["success_probability"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(switchlab(&["run", "--table", "1", "--column", "7"]).status.code(), Some(2));
    assert_eq!(switchlab(&["run", "--table", "9", "--column", "0"]).status.code(), Some(2));
    assert_eq!(switchlab(&["run", "--column", "0", "--gamma", "1.5"]).status.code(), Some(2));
}

#[test]
fn seeded_histogram_is_frozen() {
    let args = ["run", "--table", "1", "--column", "1", "--gamma", "0.3", "--shots", "6000", "--seed", "7"];
    let v = json(&args);
    assert_eq!(v["results"]["histogram"], serde_json::json!([434, 4666, 481, 419]));
    assert_eq!(v["seed"], 7);
    assert_eq!(without_timing(v), without_timing(json(&args)));
}

#[test]
fn csv_histogram() {
    let out = switchlab(&["--csv", "run", "--column", "1", "--gamma", "0.3", "--shots", "6000", "--seed", "7"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "outcome,probability,count");
    assert_eq!(lines[2], "1,0.775000000000,4666");
    assert_eq!(switchlab(&["--csv", "attack"]).status.code(), Some(2));
}

#[test]
fn pretty_output() {
    let out = switchlab(&["--pretty", "scs", "ABCD", "ABDC"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("switchlab scs"));
    assert!(text.contains("ABCDC"));
}

#[test]
fn thread_count_does_not_change_results() {
    let one = json(&["--threads", "1", "enumerate", "--list", "--classes"]);
    let many = json(&["--threads", "4", "enumerate", "--list", "--classes"]);
    assert_eq!(without_timing(one), without_timing(many));
    let env = Command::new(env!("CARGO_BIN_EXE_switchlab"))
        .args(["scs", "--census"])
        .env("SWITCHLAB_THREADS", "2")
        .output()
        .unwrap();
    assert!(env.status.success());
    assert_eq!(switchlab(&["--threads", "0", "scs", "ABCD"]).status.code(), Some(2));
}

#[test]
fn circuit_examples() {
    let v = json(&["circuit", "--perms", "sigma-star", "--table", "2", "--column", "1"]);
    assert!(v["results"]["fidelity"].as_f64().unwrap() >= 1.0 - 1e-10);
    assert_eq!(v["results"]["queries"]["fixed_order"], 9);
    assert_eq!(v["results"]["queries"]["switch"], 4);
    let all = json(&["circuit", "--all"]);
    assert_eq!(all["results"]["sets_checked"], 460);
    assert!(all["results"]["min_fidelity"].as_f64().unwrap() >= 1.0 - 1e-10);
    assert_eq!(
        switchlab(&["circuit", "--table", "2", "--column", "1", "--supersequence", "ABCD"]).status.code(),
        Some(2)
    );
}

#[test]
fn witness_examples() {
    let v = json(&["witness", "--components", "table1-uniform"]);
    assert!((v["results"]["p_succ"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!((v["results"]["process"]["trace"].as_f64().unwrap() - 16.0).abs() < 1e-9);
    let d = json(&["witness", "--process", "definite:BADC", "--ccgo", "--dense"]);
    assert!((d["results"]["p_succ"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(d["results"]["ccgo"]["passed"], true);
    let s = json(&["witness", "--ccgo"]);
    assert_eq!(s["results"]["ccgo"]["passed"], false);
    assert!(!s["results"]["ccgo"]["failed_constraints"].as_array().unwrap().is_empty());
}

#[test]
fn witness_component_file() {
    let f = temp_file(
        "witness.json",
        r#"[{"gates": ["1", "X", "1", "X"], "y": 0, "weight": 0.5}, {"gates": ["Z", "X", "Z", "X"], "y": 1, "weight": 0.5}]"#,
    );
    let v = json(&["witness", "--components", &f]);
    assert!((v["results"]["p_succ"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    let bad = temp_file("witness_bad.json", r#"[{"gates": ["1", "X", "1", "X"], "y": 0, "weight": 0.4}]"#);
    assert_eq!(switchlab(&["witness", "--components", &bad]).status.code(), Some(2));
    assert_eq!(switchlab(&["witness", "--process", "sideways"]).status.code(), Some(2));
}

#[test]
fn attack_examples() {
    let v = json(&["attack", "--table", "auto", "--column", "3"]);
    assert_eq!(v["results"]["success"], true);
    for run in v["results"]["runs"].as_array().unwrap() {
        assert_eq!(run["transcript"]["guessed_y"], 3);
    }
    let t1 = json(&["attack", "--table", "1"]);
    assert_eq!(t1["results"]["max_queries"], 2);
    let t2 = json(&["attack", "--table", "2"]);
    assert!(t2["results"]["max_queries"].as_u64().unwrap() <= 4);
    assert_eq!(switchlab(&["attack", "--column", "4"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(switchlab(&[]).status.code(), Some(2));
    assert_eq!(switchlab(&["frobnicate"]).status.code(), Some(2));
}
