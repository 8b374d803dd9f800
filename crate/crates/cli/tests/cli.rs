use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn coordline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coordline"))
        .args(args)
        .env_remove("COORDLINE_CAP")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON report")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn validate_preset_succeeds() {
    let out = coordline(&["validate", "--preset", "dsbs"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["pass"], true);
    assert_eq!(r["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn invalid_aux_exits_with_check_failure() {
    let dir = tempfile::tempdir().unwrap();
    // A1_3 = X3 breaks the chain through the inner auxiliary on a Markov line.
    let cfg = r#"{
        "schema_version": 1,
        "network": {
            "axes": ["X1", "X2", "X3"],
            "alphabets": [2, 2, 2],
            "target": [0.28125, 0.09375, 0.03125, 0.09375, 0.09375, 0.03125, 0.09375, 0.28125]
        },
        "aux": { "A1_3": { "equals-action": 3 }, "A1_2": { "equals-action": 2 } }
    }"#;
    let path = write(dir.path(), "bad.json", cfg);
    let out = coordline(&["validate", "--config", &path]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["pass"], false);
    assert!(!r["violations"].as_array().unwrap().is_empty());
}

#[test]
fn inapplicable_region_exits_three() {
    let out = coordline(&["region", "--preset", "dsbs", "--theorem", "deterministic"]);
    assert_eq!(out.status.code(), Some(3));
    let r = report(&out);
    assert_eq!(r["region"]["applicable"], false);
    assert!(r["region"]["reason"].as_str().unwrap().contains("inapplicable"));
}

#[test]
fn markov_region_without_common_randomness() {
    // Z_i = X_{i+1} forces a full bit per hop and h(0.25) of local randomness per node.
    let out = coordline(&["region", "--preset", "markov-bsc", "--theorem", "markov", "--point", "0,1,1,0.82,0.82,0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(&out)["region"]["pass"], true);
    // The preset's own operating point leans on common randomness instead.
    let out = coordline(&["region", "--preset", "markov-bsc", "--theorem", "markov"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(&out)["region"]["applicable"], true);
}

#[test]
fn functional_region_names_missing_z() {
    let out = coordline(&["region", "--preset", "copy-chain", "--theorem", "functional"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Z2, Z3"));
}

#[test]
fn point_below_region_fails() {
    let out = coordline(&["region", "--preset", "dsbs", "--theorem", "large-cr", "--point", "0,0,0,0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exact_uniform_is_zero() {
    let out = coordline(&["exact", "--preset", "independent-uniform", "--n", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    for s in r["summary"].as_array().unwrap() {
        assert_eq!(s["mean_tv"].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn rates_report_has_resources() {
    let out = coordline(&["rates", "--preset", "dsbs"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["collision"]["pass"], true);
    assert!(r["resources"]["rc"].as_f64().is_some());
}

#[test]
fn margin_flag_changes_rates() {
    let a = report(&coordline(&["rates", "--preset", "dsbs", "--margin", "0"]));
    let b = report(&coordline(&["rates", "--preset", "dsbs", "--margin", "1"]));
    assert_ne!(a["rates"], b["rates"]);
    assert!(a["collision"]["rows"].as_array().unwrap().iter().all(|r| r["slack"].as_f64().unwrap() > -1e-9));
}

#[test]
fn transfer_conserves_total() {
    let out = coordline(&["transfer", "--preset", "dsbs", "--kind", "to-common", "--node", "1", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let rc = |p: &Value| p["rc"].as_f64().unwrap();
    assert!((rc(&r["after"]) - rc(&r["before"]) - 0.1).abs() < 1e-12);
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, threads: &str| {
        let out_dir = dir.path().join(sub);
        let o = coordline(&[
            "simulate", "--preset", "dsbs", "--n", "1,2", "--trials", "500", "--codebooks", "2", "--seed", "7",
            "--threads", threads, "--out", out_dir.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        (std::fs::read(out_dir.join("report.json")).unwrap(), std::fs::read(out_dir.join("series.csv")).unwrap())
    };
    let a = run("a", "1");
    let b = run("b", "3");
    assert_eq!(a, b);
    let csv = String::from_utf8(a.1).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2);
}

#[test]
fn report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("r");
    let out = coordline(&["exact", "--preset", "dsbs", "--n", "1", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(out_dir.join("report.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
    assert_eq!(text.as_bytes(), out.stdout.as_slice());
}

#[test]
fn unknown_field_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "u.json", "{\"schema_version\": 1,\n \"preset\": \"dsbs\",\n \"bogus\": 1}");
    let out = coordline(&["validate", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bogus") && err.contains(":3:"), "{err}");
}

#[test]
fn wrong_schema_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "v.json", r#"{"schema_version": 9, "preset": "dsbs"}"#);
    assert_eq!(coordline(&["validate", "--config", &path]).status.code(), Some(2));
}

#[test]
fn missing_source_is_a_usage_error() {
    assert_eq!(coordline(&["validate"]).status.code(), Some(2));
    assert_eq!(coordline(&["validate", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(coordline(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn cap_flag_maps_to_resource_exit() {
    let out = coordline(&["exact", "--preset", "dsbs", "--n", "3", "--cap", "2^4"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn fme_projects_rational_system() {
    let dir = tempfile::tempdir().unwrap();
    // x ≥ y, x/2 + y ≥ 3/2, y ≤ 4: eliminating y leaves x ≥ 1 and x/2 ≥ -5/2.
    let path = write(
        dir.path(),
        "s.json",
        r#"{"schema_version": 1, "system": {"vars": ["x", "y"], "eliminate": ["y"], "rows": [
            {"coeffs": [1, -1], "rhs": 0},
            {"coeffs": ["1/2", 1], "rhs": "3/2"},
            {"coeffs": [0, -1], "rhs": -4}]}}"#,
    );
    let out = coordline(&["fme", "--config", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let rows = r["projected"]["rows"].as_array().unwrap();
    let x = r["projected"]["vars"].as_array().unwrap().iter().position(|v| v == "x").unwrap();
    let bounds: Vec<f64> = rows
        .iter()
        .filter(|row| row["coeffs"][x] != "0")
        .map(|row| {
            let c: f64 = eval_ratio(row["coeffs"][x].as_str().unwrap());
            row["rhs_f64"].as_f64().unwrap() / c
        })
        .collect();
    let tightest = bounds.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!((tightest - 1.0).abs() < 1e-12, "{bounds:?}");
}

fn eval_ratio(s: &str) -> f64 {
    match s.split_once('/') {
        Some((p, q)) => p.parse::<f64>().unwrap() / q.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}
