use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_graphcalc"));
    c.env_remove("GRAPHCALC_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", path.to_str().unwrap()]);
    let o = run(&all);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bounds_on_four_cycle() {
    let dir = TempDir::new().unwrap();
    let c4 = gen(&dir, "c4.json", &["cycle", "--n", "4"]);
    let o = run(&["bounds", s(&c4), "--mode", "closed"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["schema"], "graphcalc/1");
    assert!((num(&r["lambda"]) - 2.0).abs() < 1e-12);
    let bound = |name: &str| {
        let b = r["bounds"].as_array().unwrap().iter().find(|b| b["name"] == name).unwrap();
        num(&b["value"])
    };
    assert!((bound("dodziuk") - 0.25).abs() < 1e-12);
    assert!((bound("mohar") - (2.0 - 3f64.sqrt())).abs() < 1e-12);
    assert_eq!(r["sound"], true);
}

#[test]
fn bounds_with_eigenvalue_corollary() {
    let dir = TempDir::new().unwrap();
    let c8 = gen(&dir, "c8.json", &["cycle", "--n", "8"]);
    let o = run(&["bounds", s(&c8), "--nu", "3"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    let entries = r["eigenvalue_corollary"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 7);
    assert!(entries.iter().all(|e| e["holds"] == true));
}

#[test]
fn report_embeds_input_hash() {
    let dir = TempDir::new().unwrap();
    let c5 = gen(&dir, "c5.json", &["cycle", "--n", "5"]);
    let r = json(&run(&["info", s(&c5)]));
    let expected = hex_digest(&fs::read(&c5).unwrap());
    assert_eq!(r["input_sha256"], expected.as_str());
    assert_eq!(r["vertices"], 5);
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn verify_green_suite_passes() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "r.json", &["random", "--n", "9", "--extra", "5", "--weighted", "--boundary", "2", "--seed", "4"]);
    let o = run(&["verify", s(&g), "--suite", "green", "--trials", "100", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json(&o)["passed"], true);
}

#[test]
fn every_suite_passes_on_a_dirichlet_path() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "p.json", &["path", "--n", "7", "--boundary-ends"]);
    for suite in ["coarea", "ff", "green", "sobolev", "nash", "trudinger", "gennash"] {
        let o = run(&["verify", s(&g), "--suite", suite, "--trials", "50", "--seed", "1"]);
        assert_eq!(code(&o), 0, "{suite}: {}", String::from_utf8_lossy(&o.stdout));
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "d.json", &["doubled-radial", "--n", "6", "--nu", "3"]);
    let args = ["verify", s(&g), "--suite", "sobolev", "--trials", "200", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    let c = bin().args(args).env("GRAPHCALC_THREADS", "1").output().unwrap();
    let d = bin().args(args).env("GRAPHCALC_THREADS", "3").output().unwrap();
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(a.stdout, d.stdout);
}

#[test]
fn verify_accepts_a_function_file() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "p.json", &["path", "--n", "5", "--boundary-ends"]);
    let f = dir.path().join("f.json");
    fs::write(&f, r#"{"values":{"1":0,"2":1.5,"3":-2,"4":0.25,"5":0}}"#).unwrap();
    let o = run(&["verify", s(&g), "--suite", "nash", "--trials", "10", "--function", s(&f)]);
    assert_eq!(code(&o), 0);
    fs::write(&f, r#"{"values":{"1":1,"2":1.5,"3":-2,"4":0.25,"5":0}}"#).unwrap();
    let o = run(&["verify", s(&g), "--suite", "nash", "--function", s(&f)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn input_and_usage_errors_exit_two() {
    assert_eq!(code(&run(&["iso", "missing.json"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    assert_eq!(code(&run(&[])), 2);
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"vertices":[{"id":"a"}],"edges":[{"u":"a","v":"w"}]}"#).unwrap();
    assert_eq!(code(&run(&["info", s(&bad)])), 2);
    fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&run(&["info", s(&bad)])), 2);
    let c4 = gen(&dir, "c4.json", &["cycle", "--n", "4"]);
    assert_eq!(code(&run(&["verify", s(&c4), "--suite", "nash", "--nu", "2"])), 2);
    assert_eq!(code(&run(&["verify", s(&c4), "--suite", "gennash"])), 2);
    assert_eq!(code(&run(&["iso", s(&c4), "--nu", "0.5"])), 2);
    let o = bin().args(["info", s(&c4)]).env("GRAPHCALC_THREADS", "many").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn enumeration_cap_requires_force() {
    let dir = TempDir::new().unwrap();
    let g = gen(&dir, "c.json", &["cycle", "--n", "10"]);
    assert_eq!(code(&run(&["iso", s(&g), "--variant", "tilde", "--max-subset", "6"])), 2);
    let o = run(&["iso", s(&g), "--variant", "tilde", "--max-subset", "6", "--force"]);
    assert_eq!(code(&o), 0);
    assert!(num(&json(&o)["value"]) > 0.0);
}

#[test]
fn iso_reports_witness_ids() {
    let dir = TempDir::new().unwrap();
    let p = gen(&dir, "p.json", &["path", "--n", "3", "--boundary-ends"]);
    let r = json(&run(&["iso", s(&p), "--nu", "inf"]));
    assert!((num(&r["value"]) - 2.0).abs() < 1e-12);
    assert_eq!(r["witness"]["vertices"], serde_json::json!(["2"]));
    let c4 = gen(&dir, "c4.json", &["cycle", "--n", "4"]);
    let r = json(&run(&["iso", s(&c4), "--variant", "tilde"]));
    assert!((num(&r["value"]) - 1.0).abs() < 1e-12);
}

#[test]
fn spectrum_csv_lists_cycle_eigenvalues() {
    let dir = TempDir::new().unwrap();
    let c4 = gen(&dir, "c4.json", &["cycle", "--n", "4"]);
    let o = run(&["spectrum", s(&c4)]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,eigenvalue"));
    let values: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    for (got, want) in values.iter().zip([0.0, 2.0, 2.0, 4.0]) {
        assert!((got - want).abs() < 1e-12);
    }
    let r = json(&run(&["spectrum", s(&c4), "--out", "json", "--vectors"]));
    assert_eq!(r["eigenfunctions"].as_array().unwrap().len(), 4);
}

#[test]
fn heat_diagonal_on_single_edge() {
    let dir = TempDir::new().unwrap();
    let k2 = gen(&dir, "k2.json", &["complete", "--n", "2"]);
    let o = run(&["heat", s(&k2), "--t", "0.5,1,2", "--diag", "--x", "1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "t,value");
    for row in &rows[1..] {
        let mut it = row.split(',').map(|x| x.parse::<f64>().unwrap());
        let (t, k) = (it.next().unwrap(), it.next().unwrap());
        assert!((k - (1.0 + (-2.0 * t).exp()) / 2.0).abs() < 1e-12);
    }
    assert_eq!(code(&run(&["heat", s(&k2), "--t", "1"])), 2);
}

#[test]
fn heat_nash_and_decay_checks() {
    let dir = TempDir::new().unwrap();
    let r = gen(&dir, "r.json", &["radial", "--n", "8", "--nu", "3"]);
    let o = run(&["heat", s(&r), "--nash", "--nu", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(num(&v["max_scaled"]) <= num(&v["c2"]) + 1e-9);
    let o = run(&["heat", s(&r), "--decay-profile", "power:3", "--t", "0.1,1,10"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["holds"], true);
    assert_eq!(code(&run(&["heat", s(&r), "--nash"])), 2);
    assert_eq!(code(&run(&["heat", s(&r), "--decay-profile", "exp:3"])), 2);
}

#[test]
fn flow_certifies_complete_graph() {
    let dir = TempDir::new().unwrap();
    let k4 = gen(&dir, "k4.json", &["complete", "--n", "4"]);
    let o = run(&["flow", s(&k4), "--set", "1", "--c", "1"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["holds"], true);
    assert_eq!(r["c"], "1");
    assert_eq!(code(&run(&["flow", s(&k4), "--set", "1", "--c", "4"])), 2);
    assert_eq!(code(&run(&["flow", s(&k4), "--set", "9"])), 2);
}

#[test]
fn generators_write_loadable_graphs() {
    let dir = TempDir::new().unwrap();
    let cases: [&[&str]; 8] = [
        &["path", "--n", "4"],
        &["cycle", "--n", "1"],
        &["complete", "--n", "5"],
        &["hypercube", "--d", "3"],
        &["radial", "--n", "6", "--nu", "5/2"],
        &["doubled-radial", "--n", "6", "--nu", "2"],
        &["classical-radial", "--n", "4", "--nu", "2"],
        &["random", "--n", "10", "--extra", "4", "--seed", "3"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let g = gen(&dir, &format!("g{i}.json"), args);
        let o = run(&["info", s(&g)]);
        assert_eq!(code(&o), 0, "{args:?}");
    }
    let q3 = json(&run(&["info", s(&dir.path().join("g3.json"))]));
    assert_eq!(q3["vertices"], 8);
    assert_eq!(q3["edges"], 12);
    assert!((num(&q3["rho_sup"]) - 1.5).abs() < 1e-15);
}
