//! Golden artifacts for the shipped configs, and byte-determinism of reports.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the files under `goldens/`.

use std::path::PathBuf;

use toric_periods::config::RunConfig;
use toric_periods::report::{run, Command};

const CASES: &[(Command, &str)] = &[
    (Command::Orbital, "q3_l2"),
    (Command::Spectral, "q3_l2"),
    (Command::Optimal, "q3_l2"),
    (Command::TowerCheck, "q5_l3"),
    (Command::Spectral, "q5_l3"),
    (Command::VerifyTheoremD, "q5_l3"),
    (Command::VerifyJpi, "q5_l3"),
    (Command::Optimal, "q5_l3"),
    (Command::Reps, "q5_l3"),
    (Command::VerifyTheoremD, "q7_l3"),
];

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn load(name: &str) -> RunConfig {
    let path = root().join("configs").join(format!("{name}.json"));
    RunConfig::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

#[test]
fn reports_match_golden_files() {
    let update = std::env::var("UPDATE_GOLDEN").is_ok_and(|v| v == "1");
    let mut stale = vec![];
    for &(cmd, cfg) in CASES {
        let text = run(cmd, &load(cfg)).unwrap().to_json();
        let path = root().join("goldens").join(format!("{}__{cfg}.json", cmd.name()));
        if update {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let golden = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        if golden != text {
            stale.push(path.display().to_string());
        }
    }
    assert!(stale.is_empty(), "reports differ from goldens: {stale:?}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    for cmd in [Command::Spectral, Command::VerifyJpi, Command::TowerCheck, Command::Optimal] {
        let cfg = load("q5_l3");
        let a = run(cmd, &cfg).unwrap().to_json();
        let b = run(cmd, &cfg).unwrap().to_json();
        assert_eq!(a, b, "{}", cmd.name());
    }
}

#[test]
fn shipped_configs_pass_every_check() {
    for &(cmd, cfg) in CASES {
        let report = run(cmd, &load(cfg)).unwrap();
        let failed: Vec<_> = report.failed_checks().iter().map(|c| c.name.clone()).collect();
        assert!(report.passed, "{} on {cfg}: {failed:?}", cmd.name());
    }
}

#[test]
fn goldens_carry_the_schema_version_and_required_keys() {
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root().join("docs/report.schema.json")).unwrap()).unwrap();
    let version = schema["properties"]["schema_version"]["const"].as_str().unwrap();
    for &(cmd, cfg) in CASES {
        let path = root().join("goldens").join(format!("{}__{cfg}.json", cmd.name()));
        let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(doc["schema_version"], version);
        let rule = schema["allOf"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["if"]["properties"]["command"]["const"] == cmd.name())
            .unwrap();
        for key in rule["then"]["properties"]["data"]["required"].as_array().unwrap() {
            assert!(doc["data"].get(key.as_str().unwrap()).is_some(), "{}: missing {key}", path.display());
        }
    }
}
