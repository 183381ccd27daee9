use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_filippov-beb")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn classify_ex2() {
    let v = json(&["classify", "--builtin", "ex2", "--mu", "1"]);
    assert_eq!(v["alpha"].as_f64(), Some(-0.18));
    assert_eq!(v["gamma_sign_ok"], Value::Bool(false));
    assert_eq!(v["prediction"], "not_applicable");
}

#[test]
fn cycles_ex2_three_nested() {
    let v = json(&["cycles", "--builtin", "ex2", "--mu", "1"]);
    assert_eq!(v["count"], 3);
    let st: Vec<&str> = v["stabilities"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
    assert_eq!(st, ["stable", "unstable", "stable"]);
}

#[test]
fn cycles_ex1_certificate() {
    let v = json(&["cycles", "--builtin", "ex1", "--lambda-l", "0.05", "--mu", "1"]);
    assert_eq!(v["count"], 1);
    let cert = &v["cycles"][0]["certification"];
    assert_eq!(cert["residuals_within_tol"], Value::Bool(true));
    assert_eq!(cert["certificate"]["stability"], "stable");
}

#[test]
fn pseudo_ex3() {
    let v = json(&["pseudo", "--builtin", "ex3", "--mu", "1"]);
    assert!((v["Q"].as_f64().unwrap() - 0.0384).abs() < 1e-12);
    assert_eq!(v["admissible_count"], 2);
    assert_eq!(v["case"], "two_per_mu");
}

#[test]
fn json_numbers_round_trip() {
    let v = json(&["classify", "--builtin", "ex3"]);
    let report = filippov_beb::classify::classify(&filippov_beb::model::ex3());
    assert_eq!(v["alpha"].as_f64().unwrap().to_bits(), report.alpha.unwrap().to_bits());
    assert_eq!(v["beta_L"].as_f64().unwrap().to_bits(), report.beta_l.to_bits());
    assert_eq!(v["eigen"]["omega_R"].as_f64().unwrap().to_bits(), report.eigen.unwrap().omega_r.to_bits());
}

#[test]
fn model_file_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["builtin", "ex2"]);
    assert!(out.status.success());
    let path = dir.path().join("ex2.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let from_file = json(&["classify", path.to_str().unwrap()]);
    let from_builtin = json(&["classify", "--builtin", "ex2"]);
    assert_eq!(from_file, from_builtin);
}

#[test]
fn rational_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let text = r#"{"name": "m",
        "left": {"a1": 0, "a2": 1, "a3": 0, "b1": -1, "b2": "1/10", "b3": -1},
        "right": {"a1": -1, "a2": 1, "a3": 1, "b1": -1, "b2": 0, "b3": -1},
        "mu": 1}"#;
    std::fs::write(&path, text).unwrap();
    let a = json(&["classify", path.to_str().unwrap()]);
    let b = json(&["classify", "--builtin", "ex1"]);
    assert_eq!(a["alpha"], b["alpha"]);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["classify", "--builtin", "ex9"]).status.code(), Some(1));
    assert_eq!(run(&["classify"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["classify", "--builtin", "ex1", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(run(&["classify", "/nonexistent/model.json"]).status.code(), Some(1));
    assert_eq!(run(&["map", "--builtin", "ex1", "--q-min", "3", "--q-max", "1"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));

    // A node on the right: the analysis itself fails.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("node.json");
    let text = r#"{"left": {"a1": 0, "a2": 1, "a3": 0, "b1": -1, "b2": 0.1, "b3": -1},
        "right": {"a1": -3, "a2": 1, "a3": 1, "b1": 1, "b2": -1, "b3": -1}, "mu": 1}"#;
    std::fs::write(&path, text).unwrap();
    let out = run(&["cycles", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("real eigenvalues"));
    let out = run(&["classify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn map_csv_layout() {
    let out = run(&["map", "--builtin", "ex1", "--q-min", "0.5", "--q-max", "2", "--q-points", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q,P_R,T_R,P,dP_dq,h");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0.5,"));
}

fn files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    names
}

fn manifest(dir: &Path, stem: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{stem}_manifest.json"))).unwrap()).unwrap()
}

fn roles(m: &Value) -> Vec<String> {
    m["files"].as_array().unwrap().iter().map(|f| f["role"].as_str().unwrap().to_string()).collect()
}

#[test]
fn portrait_sweep_ex1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["portrait", "--builtin", "ex1", "--sweep", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let neg = manifest(dir.path(), "ex1_mu-1");
    assert_eq!(neg["sliding"]["kind"], "attracting");
    assert!(roles(&neg).contains(&"sliding".to_string()));
    assert!(!roles(&neg).contains(&"cycle".to_string()));
    let zero = manifest(dir.path(), "ex1_mu0");
    assert!(!roles(&zero).contains(&"sliding".to_string()));
    let pos = manifest(dir.path(), "ex1_mu1");
    assert_eq!(roles(&pos).iter().filter(|r| *r == "cycle").count(), 1);
    assert!(files(dir.path()).contains(&"ex1_mu1_0.csv".to_string()));
}

#[test]
fn portrait_ex2_has_three_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["portrait", "--builtin", "ex2", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let m = manifest(dir.path(), "ex2_mu1");
    assert_eq!(roles(&m).iter().filter(|r| *r == "cycle").count(), 3);
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = run(&["portrait", "--builtin", "ex3", "--mu", "-1", "--ring", "4", "--out", d.path().to_str().unwrap()]);
        assert!(out.status.success());
    }
    let names = files(a.path());
    assert_eq!(names, files(b.path()));
    for n in names {
        assert_eq!(std::fs::read(a.path().join(&n)).unwrap(), std::fs::read(b.path().join(&n)).unwrap(), "{n}");
    }
    assert_eq!(run(&["cycles", "--builtin", "ex2"]).stdout, run(&["cycles", "--builtin", "ex2"]).stdout);
}

#[test]
fn simulate_writes_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "simulate", "--builtin", "ex1", "--x0", "0", "--y0", "2", "--t-max", "20", "--format", "csv", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("t,x,y,mode\n"));
    let events = std::fs::read_to_string(dir.path().join("ex1_mu1_events.csv")).unwrap();
    assert!(events.starts_with("t,kind,y\n"));
    assert!(events.contains("cross_LR"));
}
