use std::path::Path;
use std::process::Command;

use nevlab::corpus::Corpus;
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn nevlab(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_nevlab")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write_corpus(dir: &Path, ids: &[&str]) -> String {
    let reference = Corpus::reference();
    let entries: Vec<_> = ids.iter().map(|id| reference.get(id).unwrap().entry.clone()).collect();
    let path = dir.join("corpus.json");
    std::fs::write(&path, serde_json::to_string_pretty(&entries).unwrap()).unwrap();
    path.display().to_string()
}

#[test]
fn compute_characteristic_of_exp() {
    let run = nevlab(&["compute", "T", "--function", "exp", "--r", "3.141592653589793"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let v: Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(v["functional"], "T");
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!(v["error_estimate"].as_f64().unwrap() >= 0.0);
}

#[test]
fn compute_counting_and_thresholds() {
    let run = nevlab(&["compute", "N", "--function", "pole-at-2", "--r", "4"]);
    let v: Value = serde_json::from_str(&run.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);

    let run = nevlab(&["compute", "alpha1", "--function", "exp", "--r", "10"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let v: Value = serde_json::from_str(&run.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0 / 10f64.ln().sqrt()).abs() < 1e-12);

    let run = nevlab(&["compute", "S", "--function", "rational-1", "--r", "5", "--eta", "0.001"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
}

#[test]
fn compute_exit_codes() {
    let bad_radius = nevlab(&["compute", "m", "--function", "exp", "--r", "-1"]);
    assert_eq!(bad_radius.code, 2);
    assert!(bad_radius.stderr.starts_with("nevlab: "));
    assert_eq!(nevlab(&["compute", "m", "--function", "no-such-function", "--r", "2"]).code, 2);
    assert_eq!(nevlab(&["compute", "frobnicate", "--function", "exp", "--r", "2"]).code, 2);
    // the a-points of exp(z^2) are not known in closed form
    assert_eq!(nevlab(&["compute", "N", "--function", "exp-z2", "--r", "2", "--a", "1"]).code, 3);
    assert_eq!(nevlab(&["compute", "m", "--function", "exp", "--r", "2", "--tol", "1e-300"]).code, 4);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let report_arg = report.display().to_string();

    let corpus = write_corpus(dir.path(), &["exp", "rational-1"]);
    let pass = nevlab(&["verify", "--corpus", &corpus, "--check", "check_first_main", "--output", &report_arg]);
    assert_eq!(pass.code, 0, "{}{}", pass.stdout, pass.stderr);
    assert!(pass.stdout.contains("check_first_main"));
    let reports: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().all(|r| r["schema"] == "nevlab-report-1"));

    // a pole at the origin moves by the step and, for small enough steps,
    // breaks the shifted-counting bound
    let corpus = write_corpus(dir.path(), &["pole-origin"]);
    let fail = nevlab(&[
        "verify", "--corpus", &corpus, "--check", "check_shifted_counting", "--seed", "7", "--output", &report_arg,
    ]);
    assert_eq!(fail.code, 1, "{}{}", fail.stdout, fail.stderr);
    assert!(fail.stdout.contains("FAIL check_shifted_counting pole-origin"));

    let missing = dir.path().join("absent.json").display().to_string();
    assert_eq!(nevlab(&["verify", "--corpus", &missing, "--output", &report_arg]).code, 2);
    assert_eq!(nevlab(&["verify", "--check", "check_nothing", "--output", &report_arg]).code, 2);
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"eps": 2.0}"#).unwrap();
    let config = config.display().to_string();
    assert_eq!(nevlab(&["verify", "--corpus", &corpus, "--config", &config, "--output", &report_arg]).code, 2);
}

#[test]
fn characteristic_plot_is_deterministic_lf_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let svg = dir.path().join("t.svg");
    let args = [
        "plot", "characteristic", "--function", "exp", "--r", "2:50:geometric:9",
        "--output", csv.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ];
    assert_eq!(nevlab(&args).code, 0);
    let first = std::fs::read(&csv).unwrap();
    assert_eq!(nevlab(&args).code, 0);
    assert_eq!(first, std::fs::read(&csv).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,T,N,m");
    assert_eq!(lines.len(), 10);
    let last: Vec<f64> = lines[9].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 50.0);
    assert!((last[1] - 50.0 / std::f64::consts::PI).abs() < 1e-6);
    let chart = std::fs::read_to_string(&svg).unwrap();
    assert!(chart.contains("<svg") && chart.trim_end().ends_with("</svg>"));
}

#[test]
fn eta_sweep_reaches_small_proximity() {
    let run = nevlab(&["plot", "eta-sweep", "--function", "rational-1", "--r", "5", "--k", "12"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let lines: Vec<&str> = run.stdout.lines().collect();
    assert_eq!(lines[0], "k,eta,forward,reverse,sum");
    assert_eq!(lines.len(), 14);
    let last: Vec<f64> = lines[13].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 12.0);
    assert!(last[4] < 0.02, "{}", last[4]);
}

#[test]
fn plot_rejects_short_ranges() {
    assert_eq!(nevlab(&["plot", "characteristic", "--function", "exp", "--r", "2:50:geometric:1"]).code, 2);
    assert_eq!(nevlab(&["plot", "eta-sweep", "--function", "exp", "--r", "2:5"]).code, 2);
}
