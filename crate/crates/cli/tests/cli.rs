#![allow(clippy::needless_range_loop)]

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclic-thomae")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn enumerate_n3_six_points() {
    let path = data("n3_six.toml");
    let out = run(&["enumerate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let records = v["result"]["records"].as_array().unwrap();
    assert_eq!(records.len(), 90);
    for r in records {
        let beta: Vec<u64> = r["beta"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
        for k in 0..3 {
            assert_eq!(beta.iter().filter(|&&b| b == k).count(), 2, "{beta:?}");
        }
        assert_eq!(r["order"], 0);
    }
}

#[test]
fn missing_lambda_is_input_error() {
    let dir = std::env::temp_dir().join(format!("cyclic-thomae-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("no_lambda.toml");
    std::fs::write(&path, "N = 2\nR = [1, 1, 1, 1]\n").unwrap();
    let out = run(&["periods", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));
    let out = run(&["enumerate", dir.join("absent.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bad_arguments_are_input_errors() {
    let path = data("t2.toml");
    let p = path.to_str().unwrap();
    assert_eq!(run(&["verify", p, "--beta", "0,0,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", p, "--beta", "0,x"]).status.code(), Some(2));
    assert_eq!(run(&["verify", p]).status.code(), Some(2));
    assert_eq!(run(&["periods", p, "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate", p]).status.code(), Some(2));
}

#[test]
fn verify_all_admissible_hyperelliptic() {
    let path = data("t1.toml");
    let out = run(&["verify", "--all-admissible", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["status"], "PASS");
    let reports = v["result"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 6);
    for r in reports {
        assert!(r["constancy"]["drift"].as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn stated_exponents_fail_verification() {
    let path = data("t1.toml");
    let out = run(&["verify", "--all-admissible", "--exponents", "stated", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "FAIL");
}

#[test]
fn output_is_byte_stable() {
    let path = data("t2.toml");
    let p = path.to_str().unwrap();
    for cmd in ["verify", "kernels"] {
        let args: Vec<&str> = if cmd == "verify" { vec![cmd, "--all-admissible", p] } else { vec![cmd, p] };
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.status.code(), Some(0), "{cmd}");
        assert_eq!(a.stdout, b.stdout, "{cmd}");
    }
}

#[test]
fn out_flag_writes_file() {
    let path = data("t2.toml");
    let target = std::env::temp_dir().join(format!("cyclic-thomae-periods-{}.json", std::process::id()));
    let out = run(&["periods", path.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    let tau = v["result"]["tau"].as_array().unwrap();
    assert_eq!(tau.len(), 2);
    for i in 0..2 {
        for j in 0..2 {
            let a = &tau[i][j];
            let b = &tau[j][i];
            assert!((a[0].as_f64().unwrap() - b[0].as_f64().unwrap()).abs() < 1e-10);
            assert!((a[1].as_f64().unwrap() - b[1].as_f64().unwrap()).abs() < 1e-10);
        }
        assert!(tau[i][i][1].as_f64().unwrap() > 0.0);
    }
    std::fs::remove_file(&target).ok();
}
