use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_panel-lattices");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove(panel_lattices_cli::CACHE_ENV)
        .output()
        .expect("binary runs")
}

fn schema() -> jsonschema::Validator {
    let text = include_str!("../schema/report.schema.json");
    let schema: Value = serde_json::from_str(text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn validate(stdout: &[u8]) -> Value {
    let report: Value = serde_json::from_slice(stdout).expect("json report");
    let v = schema();
    let errors: Vec<String> = v.iter_errors(&report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
    report
}

#[test]
fn gamma2_presentation() {
    let out = run(&[
        "lattice", "--family", "a2-cyclic", "--q", "2", "--delta", "0,1,3", "--delta", "0,1,3",
        "--delta", "0,1,3", "--format", "text",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for line in ["s1^7", "s2^7", "s3^7", "    s1 s2 s3\n", "s1^3 s2^3 s3^3"] {
        assert!(text.contains(line), "{line} missing from\n{text}");
    }
}

#[test]
fn gamma3_homology() {
    let out = run(&["homology", "--family", "a2-cyclic", "--q", "3", "--delta", "0,1,3,9"]);
    assert!(out.status.success());
    let report = validate(&out.stdout);
    let h1 = report["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "a2-cyclic.h1")
        .unwrap();
    assert_eq!(h1["data"], "(Z/13)^2");
}

#[test]
fn orderings_change_gamma2() {
    let out = run(&["homology", "--family", "a2-cyclic", "--q", "2", "--order", "0,2,1", "--order", "0,1,2", "--order", "0,1,2"]);
    assert!(out.status.success());
    let report = validate(&out.stdout);
    let h1 = report["records"].as_array().unwrap().iter().find(|r| r["name"] == "a2-cyclic.h1").unwrap();
    assert_eq!(h1["data"], "Z/7");
}

#[test]
fn not_a_prime_power() {
    let out = run(&["plane", "--q", "6"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not a prime power"), "{err}");
}

#[test]
fn invalid_difference_set_is_rejected() {
    let out = run(&["lattice", "--family", "a2-cyclic", "--q", "2", "--delta", "0,1,2"]);
    assert!(!out.status.success());
}

#[test]
fn reports_validate_against_schema() {
    for args in [
        vec!["plane", "--q", "4"],
        vec!["quadrangle", "--q", "3"],
        vec!["lattice", "--family", "c2-two-panel", "--q", "3"],
        vec!["lattice", "--family", "a2-general", "--q", "2"],
        vec!["crosscheck", "--q", "3"],
        vec!["hjelmslev", "--q", "3"],
        vec!["all", "--q", "2"],
    ] {
        let out = run(&args);
        assert!(out.status.success(), "{args:?}");
        let report = validate(&out.stdout);
        assert_eq!(report["status"], "pass");
        assert!(report["records"].as_array().unwrap().iter().all(|r| !r["anchor"].as_str().unwrap().is_empty()));
    }
}

#[test]
fn failing_checks_exit_nonzero() {
    let out = run(&["homology", "--family", "c2-one-panel", "--q", "3"]);
    assert!(!out.status.success());
    let report = validate(&out.stdout);
    assert_eq!(report["status"], "fail");
}

#[test]
fn reports_are_deterministic() {
    for format in ["json", "text"] {
        let args = ["all", "--q", "3", "--format", format];
        let a = run(&args);
        let b = run(&["--jobs", "1", "all", "--q", "3", "--format", format]);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stdout, run(&args).stdout);
    }
}

#[test]
fn output_file_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let cache = dir.path().join("cache");
    let args = ["plane", "--q", "3", "--output", report.to_str().unwrap()];
    for _ in 0..2 {
        let out = Command::new(BIN)
            .args(args)
            .env(panel_lattices_cli::CACHE_ENV, &cache)
            .output()
            .unwrap();
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    validate(&std::fs::read(&report).unwrap());
    let cached = std::fs::read_to_string(cache.join("pg2-q3.txt")).unwrap();
    assert_eq!(panel_lattices::IncidenceStructure::from_text(&cached).unwrap().num_points(), 13);
    std::fs::write(cache.join("pg2-q3.txt"), "garbage").unwrap();
    let out = Command::new(BIN)
        .args(args)
        .env(panel_lattices_cli::CACHE_ENV, &cache)
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn schema_rejects_malformed_reports() {
    let out = run(&["plane", "--q", "2"]);
    let mut report = validate(&out.stdout);
    report["records"][0]["status"] = "maybe".into();
    assert!(!schema().is_valid(&report));
    let mut report = validate(&out.stdout);
    report["records"][0].as_object_mut().unwrap().remove("anchor");
    assert!(!schema().is_valid(&report));
}
