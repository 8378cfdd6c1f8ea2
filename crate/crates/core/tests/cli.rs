use std::process::{Command, Output};

use serde_json::Value;

fn sqrtsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqrtsum")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    assert_eq!(text.trim_end().lines().count(), 1, "{text}");
    serde_json::from_str(text.trim_end()).unwrap()
}

#[test]
fn sqrt_and_w_print_json() {
    let out = sqrtsum(&["sqrt", "--r", "7", "--s", "2"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["roots"], serde_json::json!([3, 4]));

    let out = sqrtsum(&["count", "W", "--n", "2", "--k", "2"]);
    assert_eq!(json(&out)["W"], 8);
}

#[test]
fn prop3_count_reports_identity_side() {
    let out = sqrtsum(&["count", "prop3", "--r", "7", "--n", "1", "--v", "1,2"]);
    let v = json(&out);
    assert_eq!(v["raw_count"], 14);
    assert!((v["identity_value"].as_f64().unwrap() - 98.0).abs() < 1e-9);
}

#[test]
fn verify_skip_is_not_an_error() {
    let out = sqrtsum(&["verify", "prop2", "--r", "101", "--seed", "1", "--X", "0"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["status"], "skipped");
    assert!(v["reason"].as_str().unwrap().starts_with("InvalidParams"));
}

#[test]
fn verify_reports_ceiling() {
    let out = sqrtsum(&["verify", "cishz", "--r", "101", "--seed", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["within_ceiling"], true);
}

#[test]
fn bad_modulus_exits_2_with_json_error() {
    let out = sqrtsum(&["legendre", "--r", "8", "--a", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert_eq!(stderr_error(&out)["error"], "BadModulus");
}

#[test]
fn usage_error_exits_2() {
    let out = sqrtsum(&["sqrt", "--r"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"], "Usage");
}

#[test]
fn budget_exceeded_exits_3() {
    let out = sqrtsum(&["count", "prop3", "--r", "101", "--n", "3", "--v", "5,6,7,8", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_error(&out)["error"], "BudgetExceeded");
}

#[test]
fn human_output_is_aligned() {
    let out = sqrtsum(&["--human", "count", "prop3", "--r", "7", "--n", "1", "--v", "1,2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let starts: Vec<usize> = text
        .lines()
        .map(|l| {
            let key_end = l.find(' ').unwrap();
            key_end + l[key_end..].len() - l[key_end..].trim_start().len()
        })
        .collect();
    assert!(starts.len() > 1);
    assert!(starts.windows(2).all(|w| w[0] == w[1]), "{text}");
    assert!(!text.contains('{'));
}

#[test]
fn sweep_to_file_and_ceiling_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    std::fs::write(&cfg, "# tiny grid\ntarget = cishz\nprimes = 101\nseeds = 1\n").unwrap();
    let csv = dir.path().join("out.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_sqrtsum"))
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["pass"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# schema=1\n# target=cishz\nindex,r,seed,eps,X,U,status"));

    std::fs::write(&cfg, "target = cishz\nprimes = 101\nseeds = 1\nC_assert = 0.001\n").unwrap();
    let out = sqrtsum(&["sweep", "--config", cfg.to_str().unwrap(), "--output", "-"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("result=fail"));
}

#[test]
fn bad_thread_variable_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    std::fs::write(&cfg, "target = prop1\nprimes = 101\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sqrtsum"))
        .args(["sweep", "--config"])
        .arg(&cfg)
        .env("SQRTSUM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    stderr_error(&out);
}

#[test]
fn sweep_help_lists_columns() {
    let out = sqrtsum(&["sweep", "--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("trivial_bound"));
    assert!(text.contains("SQRTSUM_THREADS"));
}
