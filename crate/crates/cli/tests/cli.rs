//! End-to-end tests of the batch interface: exit codes, report schema, and
//! the documented precondition gating.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gsaw"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report must be valid JSON")
}

#[test]
fn verify_i2_all_pass_exit_zero() {
    let out = bin()
        .args(["verify", "--model"])
        .arg(fixture("i2.json"))
        .args(["--seed", "7", "--samples", "50000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = json_stdout(&out);
    assert_eq!(report["summary"]["fail"], 0);
    assert!(report["summary"]["pass"].as_u64().unwrap() >= 15);
    // both computed sides are reported
    let items = report["items"].as_array().unwrap();
    assert!(items.iter().any(|i| i["id"] == "saw-mixed-integral"
        && i["lhs"] == "1/8"
        && i["rhs"] == "1/8"));
}

#[test]
fn verify_non_dominant_skips_and_exits_zero() {
    let out = bin()
        .args(["verify", "--model"])
        .arg(fixture("non-dominant.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = json_stdout(&out);
    assert_eq!(report["hypotheses"]["diagonally_dominant"], false);
    assert_eq!(report["hypotheses"]["rho"], "2");
    assert_eq!(report["summary"]["fail"], 0);
    assert!(report["summary"]["skip"].as_u64().unwrap() >= 2);
    let items = report["items"].as_array().unwrap();
    assert!(items
        .iter()
        .any(|i| i["id"] == "walk-series-tail" && i["status"] == "skip"));
}

#[test]
fn verify_is_deterministic_under_fixed_seed() {
    let run = || {
        let out = bin()
            .args(["verify", "--model"])
            .arg(fixture("i3.json"))
            .args(["--seed", "7", "--samples", "20000"])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn malformed_model_is_input_error() {
    let dir = std::env::temp_dir();
    let path = dir.join("gsaw-malformed-model.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = bin().args(["verify", "--model"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "error should carry line context: {err}");
}

#[test]
fn missing_model_is_input_error() {
    let out = bin()
        .args(["verify", "--model", "/nonexistent/model.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sites_out_of_range_is_input_error() {
    let out = bin()
        .args(["twopoint", "--model"])
        .arg(fixture("i2.json"))
        .args(["--a", "3", "--b", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn twopoint_i2_methods_agree() {
    let out = bin()
        .args(["twopoint", "--model"])
        .arg(fixture("i2.json"))
        .args(["--a", "1", "--b", "2", "--samples", "20000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    let cells = report["cells"].as_array().unwrap();
    let value_of = |rep: &str, method: &str| -> String {
        cells
            .iter()
            .find(|c| c["representation"] == rep && c["method"] == method)
            .unwrap_or_else(|| panic!("missing cell {rep}/{method}"))["value"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(value_of("srw", "matrix-inverse"), "1/8");
    assert_eq!(value_of("saw", "enumeration"), "1/8");
    assert_eq!(value_of("saw", "grassmann-integral"), "1/8");
    assert_eq!(value_of("loop", "enumeration"), "1/8");
}

#[test]
fn twopoint_list_exposes_enumerators() {
    let out = bin()
        .args(["twopoint", "--model"])
        .arg(fixture("i3.json"))
        .args(["--a", "1", "--b", "2", "--list", "--samples", "1000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    // walks serialize as 1-based vertex arrays
    let saws = report["enumeration"]["saws"].as_array().unwrap();
    assert_eq!(saws.len(), 2);
    assert_eq!(saws[0], serde_json::json!([1, 2]));
    assert_eq!(saws[1], serde_json::json!([1, 3, 2]));
    let configs = report["enumeration"]["loop_configs"].as_array().unwrap();
    assert_eq!(configs.len(), 2); // empty config and the self-loop at 3
}

#[test]
fn twopoint_csv_flattening() {
    let out = bin()
        .args(["twopoint", "--model"])
        .arg(fixture("i2.json"))
        .args(["--a", "1", "--b", "2", "--csv", "--samples", "5000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "representation,method,value,error,note"
    );
    assert!(text.contains("srw,matrix-inverse,1/8,0,"));
}

#[test]
fn simulate_i1_kill_frequency_is_one() {
    let out = bin()
        .args(["simulate", "--model"])
        .arg(fixture("i1.json"))
        .args(["--a", "1", "--samples", "5000", "--seed", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["sites"][0]["kill_frequency"], 1.0);
    assert_eq!(report["sites"][0]["kill_frequency_target"], 1.0);
}

#[test]
fn simulate_i2_kill_site_frequency_near_quarter() {
    let out = bin()
        .args(["simulate", "--model"])
        .arg(fixture("i2.json"))
        .args(["--a", "1", "--samples", "200000", "--seed", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    let freq = report["sites"][1]["kill_frequency"].as_f64().unwrap();
    let target = report["sites"][1]["kill_frequency_target"].as_f64().unwrap();
    assert!((target - 0.25).abs() < 1e-12);
    // 3-sigma binomial gate at n = 200k
    let sigma = (0.25 * 0.75 / 200_000.0_f64).sqrt();
    assert!((freq - 0.25).abs() <= 3.0 * sigma, "freq {freq}");
}

#[test]
fn moments_match_frozen_value() {
    let out = bin()
        .args(["moments", "--model"])
        .arg(fixture("i2.json"))
        .args(["--a", "1", "--b", "2", "--powers", "1,1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    // 10/512 in lowest terms
    assert_eq!(report["moment"], "5/256");
    assert_eq!(report["agree"], true);
}

#[test]
fn susy_corpus_passes() {
    let out = bin()
        .args(["susy", "--model"])
        .arg(fixture("i3.json"))
        .args(["--seed", "11"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["summary"]["fail"], 0);
    assert_eq!(report["summary"]["skip"], 0);
}

#[test]
fn twopoint_potential_row() {
    let out = bin()
        .args(["twopoint", "--model"])
        .arg(fixture("i2.json"))
        .args(["--a", "1", "--b", "2", "--v", "1,1", "--samples", "5000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    let cell = report["cells"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["representation"] == "srw-potential" && c["method"] == "matrix-inverse")
        .expect("potential row present")
        .clone();
    assert_eq!(cell["value"], "1/15");
}

#[test]
fn float_mode_override_works() {
    let out = bin()
        .args(["twopoint", "--model"])
        .arg(fixture("i2.json"))
        .args(["--a", "1", "--b", "2", "--mode", "float", "--samples", "5000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    let cell = report["cells"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["representation"] == "srw" && c["method"] == "matrix-inverse")
        .unwrap()
        .clone();
    let v: f64 = cell["value"].as_str().unwrap().parse().unwrap();
    assert!((v - 0.125).abs() < 1e-12);
}

#[test]
fn report_writes_to_out_path() {
    let dir = std::env::temp_dir();
    let path = dir.join("gsaw-report-out.json");
    let _ = std::fs::remove_file(&path);
    let out = bin()
        .args(["moments", "--model"])
        .arg(fixture("i1.json"))
        .args(["--a", "1", "--b", "1", "--powers", "1"])
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["moment"], "1/4");
}
