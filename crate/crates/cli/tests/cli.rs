use std::process::{Command, Output};

use cppforge::lift::is_power_in;
use cppforge::search::{enumerate_by_interpolation, DEFAULT_SEARCH_CAP};
use cppforge::{FieldDesc, FiniteField};
use serde_json::Value;

fn cppforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cppforge"))
        .args(args)
        .env_remove("CPPFORGE_CAP")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = cppforge(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn code(args: &[&str]) -> i32 {
    cppforge(args).status.code().expect("exit code")
}

#[test]
fn verify_small_fields() {
    let v = json(&["verify", "--p", "2", "--r", "2", "--poly", "[0,2]"]);
    assert_eq!(v["complete"], true);
    let v = json(&["verify", "--p", "3", "--r", "1", "--poly", "[0,0,1]"]);
    assert_eq!(v["is_permutation"], false);
    assert_eq!(v["witness"], serde_json::json!([1, 2]));
}

#[test]
fn verify_matches_monomial_prediction() {
    for alpha in 1..8 {
        let a = alpha.to_string();
        let built = json(&["construct", "monomial", "--p", "2", "--r", "3", "--n", "2", "--alpha", &a, "--s", "1"]);
        let mut coeffs = vec![0; 11];
        coeffs[10] = alpha;
        let poly = serde_json::to_string(&coeffs).unwrap();
        let v = json(&["verify", "--p", "2", "--r", "3", "--n", "2", "--poly", &poly, "--lambda", "norm"]);
        assert_eq!(v["complete"], built["predicted_cpp"], "alpha = {alpha}");
        assert_eq!(built["predicted_cpp"], built["verified_cpp"]);
        assert_eq!(v["agw"]["square_commutes"], true);
        assert_eq!(v["agw"]["conclusion"], v["is_permutation"]);
    }
}

#[test]
fn constructions() {
    let f16 = FieldDesc::extension(2, 4, None).unwrap();
    let alpha = f16.elements().find(|&a| !a.is_zero() && !is_power_in(&f16, a, 3)).unwrap();
    let v = json(&["construct", "cppeg", "--e", "1", "--t", "4", "--k", "2", "--alpha", &alpha.0.to_string()]);
    assert_eq!(v["params"]["exponent"], 409);
    assert_eq!((v["predicted_cpp"].clone(), v["verified_cpp"].clone()), (true.into(), true.into()));

    let v = json(&["construct", "trace-binomial", "--p", "2", "--r", "2", "--n", "3", "--k", "1", "--a", "2", "--h", "[2]"]);
    assert_eq!(v["verified_cpp"], true);
    assert_eq!(v["predicted_cpp"], true);

    let v = json(&[
        "construct", "trace-general", "--p", "2", "--r", "2", "--n", "3", "--h", "[2]", "--l", "[(1,1)]", "--a", "2",
    ]);
    assert_eq!(v["verified_cpp"], true);
    assert!(v["identities"][0]["holds"].as_bool().unwrap());

    let v = json(&["construct", "trace-simple", "--p", "5", "--n", "2", "--h", "[2]"]);
    assert_eq!(v["verified_cpp"], true);
    assert_eq!(v["lifted"], serde_json::json!([[1, 2]]));

    let v = json(&["construct", "norm-lift", "--p", "2", "--r", "3", "--n", "2", "--h", "[3]"]);
    assert_eq!(v["predicted_cpp"], v["verified_cpp"]);
}

#[test]
fn precondition_failures_exit_2() {
    assert_eq!(code(&["construct", "norm-lift", "--p", "2", "--r", "2", "--n", "3", "--h", "[2]"]), 2);
    assert_eq!(code(&["construct", "cppeg", "--e", "1", "--t", "4", "--k", "1", "--alpha", "2"]), 2);
    assert_eq!(code(&["construct", "trace-binomial", "--p", "2", "--r", "2", "--n", "2", "--k", "1", "--a", "2", "--h", "[2]"]), 2);
    assert_eq!(code(&["construct", "trace-general", "--p", "2", "--r", "2", "--n", "2", "--h", "[2]", "--l", "[(1,1)]", "--a", "2"]), 2);
    assert_eq!(code(&["kernel-check", "--p", "2", "--r", "2", "--n", "2", "--k", "2", "--c", "1"]), 2);
    assert_eq!(code(&["verify", "--p", "6", "--poly", "[1]"]), 2);
    assert_eq!(code(&["verify", "--p", "2", "--r", "2", "--mod", "[1,0,1]", "--poly", "[1]"]), 2);
}

#[test]
fn parse_failures_exit_4() {
    assert_eq!(code(&["verify", "--p", "2", "--poly", "[1,"]), 4);
    assert_eq!(code(&["verify", "--p", "x", "--poly", "[1]"]), 4);
    assert_eq!(code(&["grid", "no-such-grid"]), 4);
    assert_eq!(code(&["construct", "trace-general", "--p", "2", "--r", "2", "--n", "3", "--h", "[2]", "--l", "[(1,", "--a", "2"]), 4);
}

#[test]
fn exhaustive_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_cppforge"))
        .args(["verify", "--p", "2", "--r", "3", "--n", "2", "--poly", "[0,1]"])
        .env("CPPFORGE_CAP", "16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap 16"));
}

#[test]
fn search_catalogs() {
    let out = cppforge(&["search", "--p", "2", "--r", "1"]);
    assert!(out.status.success() && out.stdout.is_empty());

    let out = cppforge(&["search", "--p", "2", "--r", "2"]);
    let tables: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["table"].clone())
        .collect();
    assert!(tables.contains(&serde_json::json!([0, 2, 3, 1])));
    assert!(tables.contains(&serde_json::json!([0, 3, 1, 2])));

    let dir = std::env::temp_dir().join(format!("cppforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("f5.jsonl");
    let out = cppforge(&["search", "--p", "5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let lines = std::fs::read_to_string(&path).unwrap().lines().count();
    let f5 = FieldDesc::prime(5).unwrap();
    assert_eq!(lines, enumerate_by_interpolation(&f5, true, DEFAULT_SEARCH_CAP).unwrap().len());
    std::fs::remove_dir_all(&dir).unwrap();

    assert_eq!(code(&["search", "--p", "13"]), 2);
}

#[test]
fn kernel_checks() {
    let v = json(&["kernel-check", "--p", "2", "--r", "2", "--n", "3", "--k", "1", "--c", "2"]);
    assert_eq!((v["case"].as_str(), v["predicted"].as_bool(), v["exhaustive"].as_bool()), (Some("Case1"), Some(true), Some(true)));
    let v = json(&["kernel-check", "--p", "2", "--r", "2", "--n", "2", "--k", "1", "--c", "1"]);
    assert_eq!(v["case"], "NoCaseApplies");
    assert_eq!(v["predicted"], Value::Null);
    assert_eq!(v["exhaustive"], false);
}

#[test]
fn grids() {
    let v = json(&["grid", "kernel-binomial", "--max-order", "4096", "--agw"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["agreements"], v["total"]);
    assert_eq!(v["counterexamples"], serde_json::json!([]));

    let v = json(&["grid", "trace-general", "--max-order", "256", "--instances", "30"]);
    assert_eq!(v["passed"], true);

    let out = cppforge(&["grid", "norm-lift", "--max-order", "64", "--random-h", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,total,agreements,counterexamples,agw_checked,agw_agreements"));
    assert!(lines.next().unwrap().starts_with("norm-lift,"));
}

#[test]
fn reproducible_output_is_byte_identical() {
    let args = ["construct", "trace-binomial", "--p", "2", "--r", "2", "--n", "3", "--k", "1", "--a", "2", "--h", "[2,1]", "--reproducible"];
    let a = cppforge(&args).stdout;
    let b = cppforge(&args).stdout;
    assert_eq!(a, b);
    assert!(!String::from_utf8_lossy(&a).contains("timestamp"));

    let v = json(&["verify", "--p", "2", "--poly", "[0,1]", "--format", "json"]);
    assert!(v["timestamp"].is_u64());

    let text = cppforge(&["verify", "--p", "2", "--poly", "[0,1]", "--format", "text", "--reproducible"]).stdout;
    assert!(String::from_utf8(text).unwrap().contains("complete: false\n"));
}
