//! Exit codes and artifact output of the binary.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toric-periods"))
}

fn config(name: &str) -> String {
    format!("{}/../../configs/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn passing_run_exits_zero_and_prints_json() {
    let out = bin().args(["orbital", "--D", "2*(P1)", "--config", &config("q3_l2")]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["passed"], true);
    let rows = doc["data"]["divisors"][0]["rows"].as_array().unwrap();
    assert!(!rows.is_empty() && rows.iter().all(|r| r["equal"] == true));
}

#[test]
fn out_flag_writes_the_artifact() {
    let path = std::env::temp_dir().join(format!("toric-periods-cli-{}.json", std::process::id()));
    let status = bin().args(["optimal", "--config", &config("q5_l3"), "--out"]).arg(&path).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(doc["data"]["invariant"], "1/2");
    assert_eq!(doc["data"]["is_optimal"], true);
}

#[test]
fn bad_input_exits_two() {
    let out = bin().args(["orbital", "--D", "(P99)", "--config", &config("q3_l2")]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["reps", "--tolerance", "-1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["spectral", "--config", "/nonexistent/config.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
