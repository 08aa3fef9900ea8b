use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const GENERIC: &str = r#"{"a":1,"d1":3,"d2":3,"p":5,"coeffs":{"0,1":4,"0,2":2,"0,3":2,"1,0":2,"1,1":4,"1,2":2,"1,3":3,"2,0":2,"2,1":1,"2,2":2,"2,3":2,"3,0":3,"3,1":3,"3,2":4,"3,3":1}}"#;
const NON_GENERIC: &str = r#"{"a":1,"d1":3,"d2":3,"p":5,"coeffs":{"0,0":3,"0,1":3,"0,2":2,"0,3":4,"1,2":4,"1,3":4,"2,0":1,"2,1":2,"2,3":3,"3,0":2,"3,2":4,"3,3":1}}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aswlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn hodge_counts() {
    let (code, v) = json(&["hodge", "--d1", "3", "--d2", "3"]);
    assert_eq!(code, 0);
    let h: Vec<i64> = serde_json::from_value(v["result"]["H"].clone()).unwrap();
    assert_eq!(h.iter().sum::<i64>(), 18);
    assert_eq!(v["result"]["I_D"], serde_json::json!([0, 3, 6]));
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn gnp_golden_polygon() {
    let (code, v) = json(&["gnp", "--d1", "3", "--d2", "3", "--p", "5"]);
    assert_eq!(code, 0);
    let verts = &v["result"]["snp"]["vertices"];
    assert_eq!(
        verts,
        &serde_json::json!([["0", "0"], ["1", "0"], ["4", "3/2"], ["9", "21/4"]])
    );
    assert_eq!(v["config"]["p"], 5);
}

#[test]
fn trivial_class_reports_hodge() {
    let (code, v) = json(&["gnp", "--d1", "3", "--d2", "3", "--p", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["trivial_class"], true);
    let (_, z) = json(&["zeta", "--d1", "3", "--d2", "3", "--p", "13"]);
    assert_eq!(z["result"]["trivial_class"], true);
}

#[test]
fn eigencurve_buckets_match() {
    let (code, v) = json(&["eigencurve", "--d1", "3", "--d2", "3", "--p", "5", "--imax", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["buckets"].as_array().unwrap().len(), 3);
    assert_eq!(v["result"]["all_match"], true);
}

#[test]
fn zeta_length() {
    let (code, v) = json(&["zeta", "--d1", "3", "--d2", "3", "--p", "5", "--m", "2"]);
    assert_eq!(code, 0);
    let expected: u64 = (1..=2u32)
        .map(|k| 18 * 5u64.pow(2 * (k - 1)) * 5u64.pow(k - 1) * 4)
        .sum();
    assert_eq!(v["result"]["length"], expected);
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(
        run(&["gnp", "--d1", "3", "--d2", "3", "--p", "6"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["gnp", "--d1", "3", "--d2", "3", "--p", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["gnp", "--d1", "3", "--d2", "3"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "--d1", "3", "--d2", "3", "--p", "5"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["gnp", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["hodge", "--d1", "2", "--d2", "3"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "p = 5\nunknown = 1\n");
    assert_eq!(
        run(&["gnp", "--d1", "3", "--d2", "3", "--config", &bad]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("none.json");
    assert_eq!(
        run(&["genericity", "--f", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "job.toml", "d1 = 3\nd2 = 3\np = 11\n");
    let (code, v) = json(&["gnp", "--d1", "2", "--d2", "2", "--p", "5", "--config", &cfg]);
    assert_eq!(code, 0);
    assert_eq!(v["config"]["p"], 11);
    assert_eq!(v["config"]["d1"], 3);
    assert_eq!(v["result"]["class"], serde_json::json!([2, 2]));
}

#[test]
fn config_file_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "f.json", GENERIC);
    let cfg = write(dir.path(), "job.toml", "f = \"f.json\"\n");
    let (code, v) = json(&["genericity", "--config", &cfg]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["verdict"], "IN_U");
}

#[test]
fn budget_and_precision_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", GENERIC);
    assert_eq!(run(&["genericity", "--f", &f, "--budget", "1"]).status.code(), Some(4));
    assert_eq!(run(&["verify", "--f", &f, "--budget", "10"]).status.code(), Some(4));
    assert_eq!(run(&["verify", "--f", &f, "--m", "3"]).status.code(), Some(3));
}

#[test]
fn reports_are_deterministic_and_written_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", NON_GENERIC);
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    let r1 = run(&["verify", "--f", &f, "--out", out1.to_str().unwrap()]);
    let r2 = run(&["verify", "--f", &f, "--out", out2.to_str().unwrap()]);
    assert_eq!(r1.status.code(), r2.status.code());
    assert_eq!(r1.stdout, r2.stdout);
    let a = std::fs::read(&out1).unwrap();
    assert_eq!(a, std::fs::read(&out2).unwrap());
    let v: Value = serde_json::from_slice(&a).unwrap();
    for key in ["version", "config", "precision", "result", "command"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["precision"]["dwork"]["np"], 2);
    assert_eq!(v["config"]["f"]["p"], 5);
}

fn verify_consistent(body: &str) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", body);
    let (code, v) = json(&["verify", "--f", &f]);
    let checks = v["result"]["checks"].as_array().unwrap();
    let all_pass = checks
        .iter()
        .filter(|c| c["asserted"] == true)
        .all(|c| c["status"] == "pass");
    assert_eq!(code == 0, all_pass);
    assert_eq!(v["result"]["pass"], all_pass);
    v
}

fn check<'a>(v: &'a Value, name: &str) -> &'a Value {
    v["result"]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap()
}

#[test]
fn verify_non_generic_skips_gnp_assertion() {
    let v = verify_consistent(NON_GENERIC);
    assert_eq!(v["result"]["genericity"]["verdict"], "OUTSIDE");
    assert_eq!(check(&v, "gnp_equality")["status"], "n/a");
    assert_eq!(check(&v, "hodge_bound")["status"], "pass");
    assert_eq!(check(&v, "oracle")["status"], "pass");
}

#[test]
fn verify_generic_asserts_gnp() {
    let v = verify_consistent(GENERIC);
    assert_eq!(v["result"]["genericity"]["verdict"], "IN_U");
    assert_eq!(check(&v, "gnp_equality")["asserted"], true);
    assert_eq!(check(&v, "hodge_bound")["status"], "pass");
    assert_eq!(check(&v, "oracle")["status"], "pass");
}

#[test]
fn tsv_view_lists_scalars() {
    let out = run(&["hodge", "--d1", "3", "--d2", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "config.d2\t4"));
    assert!(text.lines().all(|l| l.split('\t').count() == 2));
}
