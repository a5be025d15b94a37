//! End-to-end runs of the `horocycle` binary.

use std::process::{Command, Output};
use std::time::Instant;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horocycle")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn average_header_and_determinism() {
    let args = ["average", "--xi", "0.41421356237,0.73205080757", "--ygrid", "2..4", "--seed", "7"];
    let a = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema: horocycle-average v1"));
    assert_eq!(lines.next(), Some("y,re_avg,im_avg,re_ref,im_ref,disc,majorant,ratio,quad_err"));
    assert_eq!(data_rows(&text).len(), 3);
    let b = run(&[&args[..], &["--threads", "1"]].concat());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn average_smoke_under_a_minute() {
    let start = Instant::now();
    let o = run(&["average", "--ygrid", "8..10"]);
    assert!(o.status.success());
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn majorant_rows() {
    let o = run(&["majorant", "--xi", "0,0", "--ygrid", "2..9"]);
    assert!(o.status.success());
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r[1] == "1"));
}

#[test]
fn majorant_tilde_nonincreasing_within_factor_two() {
    let o = run(&["majorant", "--xi", "0.41421356237309503,0.7320508075688772", "--ygrid", "1..10", "--base", "4"]);
    let rows = data_rows(&stdout(&o));
    let bt: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    for w in bt.windows(2) {
        assert!(w[1] <= 2.0 * w[0], "{bt:?}");
    }
}

#[test]
fn kloosterman_output() {
    let o = run(&["kloosterman", "--c", "3", "--n", "1", "--m", "1"]);
    assert!(o.status.success());
    let rows = data_rows(&stdout(&o));
    let value: f64 = rows[0][3].parse().unwrap();
    let bound: f64 = rows[0][4].parse().unwrap();
    assert!((value + 1.0).abs() < 1e-12);
    assert!((bound - 2.0 * 3f64.sqrt()).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["majorant", "--xi", "banana"]).status.code(), Some(1));
    assert_eq!(run(&["orbit", "--matrix", "1,1,1,1"]).status.code(), Some(1));
    assert_eq!(run(&["average", "--ygrid", "5..2"]).status.code(), Some(1));
    assert_eq!(run(&["nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "xi = 0,0\nygrid = 2..3\n").unwrap();
    let o = run(&["majorant", "--config", cfg.to_str().unwrap(), "--ygrid", "2..5"]);
    assert!(o.status.success());
    assert_eq!(data_rows(&stdout(&o)).len(), 4);
    let o = run(&["majorant", "--config", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn out_file_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.json");
    let o = run(&["kloosterman", "--c", "5", "--n", "1", "--m", "2", "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["schema"], "horocycle-kloosterman");
    assert_eq!(v["rows"][0]["c"], 5);
}

#[test]
fn partition_default_audit_passes() {
    let o = run(&["partition", "--T", "1000", "--format", "json", "--reassemble"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["plan"]["intervals"].as_array().unwrap().len() > 1);
    assert_eq!(v["audit"]["disjoint"], true);
}

#[test]
fn generic_decay_is_reproducible() {
    let args = ["generic-decay", "--samples", "20", "--tmax", "1e4", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(data_rows(&stdout(&a)).len(), 20);
}

#[test]
fn check_arith_under_two_minutes() {
    let start = Instant::now();
    let o = run(&["check", "arith"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(start.elapsed().as_secs() < 120);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn check_all_passes() {
    let o = run(&["check", "all"]);
    assert!(o.status.success(), "{}", stdout(&o));
}
