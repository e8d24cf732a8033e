use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_stein-audit"));
    c.env_remove("STEIN_AUDIT_THREADS");
    c
}

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn stein-audit")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    full.extend(["--format", "json", "--out", p, "--deterministic"]);
    let out = run(&full);
    let doc = std::fs::read(&path).map_or(Value::Null, |b| serde_json::from_slice(&b).unwrap());
    (code(&out), doc)
}

fn value(doc: &Value) -> f64 {
    doc["rows"][0]["value"].as_f64().unwrap()
}

#[test]
fn pearson_wasserstein_example() {
    let (c, doc) = json_report(&["bound", "pearson", "--n", "10000", "--p1", "0.5", "--metric", "wasserstein"]);
    assert_eq!(c, 0);
    assert_eq!(value(&doc), 0.5);
    assert_eq!(doc["rows"][0]["certified"], Value::Bool(true));
}

#[test]
fn power_divergence_wasserstein_example() {
    let (c, doc) = json_report(&["bound", "pd", "--n", "1000000", "--p1", "0.5", "--lambda", "0", "--metric", "wasserstein"]);
    assert_eq!(c, 0);
    assert!((value(&doc) - 0.069799).abs() < 5e-7, "{}", value(&doc));
}

#[test]
fn kolmogorov_cap() {
    let (c, doc) = json_report(&["bound", "pearson", "--n", "2", "--p1", "0.5", "--metric", "kolmogorov"]);
    assert_eq!(c, 0);
    assert_eq!(value(&doc), 1.0);
    assert_eq!(doc["rows"][0]["cap_binding"], Value::Bool(true));
}

#[test]
fn general_bound_from_config() {
    let cfg = manifest("examples/general_rademacher.json");
    let (c, doc) = json_report(&["bound", "general", "--config", cfg.to_str().unwrap()]);
    assert_eq!(c, 0);
    let expected = (12.0 * 2f64.sqrt() + 12.0 / std::f64::consts::PI.sqrt()) / 20.0 + 12.0 * 2f64.sqrt() / 400.0;
    assert!((value(&doc) - expected).abs() < 1e-12);
    assert!(doc["details"]["terms"].is_array());
}

#[test]
fn bad_lambda_and_bad_flags_exit_2() {
    assert_eq!(code(&run(&["bound", "pd", "--n", "100", "--p1", "0.5", "--lambda", "-1"])), 2);
    assert_eq!(code(&run(&["bound", "pearson", "--n", "100"])), 2);
    assert_eq!(code(&run(&["bound", "pearson", "--n", "100", "--p1", "0.5", "--metric", "bogus"])), 2);
    assert_eq!(code(&run(&["bound", "general"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn csv_uses_seventeen_significant_digits() {
    let out = run(&["bound", "pearson", "--n", "1000", "--p1", "0.3", "--out", "-", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "kind,n,p1,lambda,metric,value,certified,cap_binding,provenance");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let mantissa = row[5].split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{}", row[5]);
    assert_eq!(row[5].parse::<f64>().unwrap(), 25.0 / 210f64.sqrt());
}

#[test]
fn verify_quadratic_identity() {
    let (c, doc) = json_report(&["verify-solution", "--g", "quadratic", "--h", "identity"]);
    assert_eq!(c, 0);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows[0]["check"], "residual");
    assert!(rows[0]["value"].as_f64().unwrap() <= 1e-8);
    assert!(rows.len() > 1);
}

#[test]
fn verify_quartic_ratios() {
    let (c, doc) = json_report(&["verify-solution", "--g", "quartic", "--h", "identity", "--orders", "2,3"]);
    assert_eq!(c, 0);
    for row in doc["rows"].as_array().unwrap().iter().skip(1) {
        assert!(row["value"].as_f64().unwrap() <= 1.0, "{row}");
    }
}

#[test]
fn inflated_derivative_claim_fails() {
    let cfg = manifest("tests/fixtures/inflated_claim.json");
    let (c, doc) = json_report(&["verify-solution", "--config", cfg.to_str().unwrap()]);
    assert_eq!(c, 1);
    assert_eq!(doc["pass"], Value::Bool(false));
}

#[test]
fn registry_miss_exits_2() {
    assert_eq!(code(&run(&["verify-solution", "--g", "septic", "--h", "identity"])), 2);
    assert_eq!(code(&run(&["verify-solution", "--g", "quadratic", "--h", "tan"])), 2);
}

#[test]
fn bundled_audit_passes() {
    let cfg = manifest("examples/pearson_dw.json");
    let (c, doc) = json_report(&["audit", "--config", cfg.to_str().unwrap()]);
    assert_eq!(c, 0);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["pass"] == Value::Bool(true)));
    assert_eq!(doc["seed"], 20240601);
}

#[test]
fn audit_bytes_do_not_depend_on_threads() {
    let cfg = manifest("examples/pearson_dw.json");
    let dir = tempfile::tempdir().unwrap();
    for format in ["json", "csv"] {
        let mut outputs = Vec::new();
        for threads in ["1", "3"] {
            let path = dir.path().join(format!("{threads}.{format}"));
            let mut cmd = bin();
            cmd.args(["audit", "--config", cfg.to_str().unwrap(), "--seed", "7", "--deterministic"])
                .args(["--format", format, "--out", path.to_str().unwrap()]);
            if threads == "3" {
                cmd.env("STEIN_AUDIT_THREADS", threads);
            } else {
                cmd.args(["--threads", threads]);
            }
            assert_eq!(code(&cmd.output().unwrap()), 0);
            outputs.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{format} output differs across thread counts");
    }
}

#[test]
fn timestamp_only_without_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&["bound", "pearson", "--n", "100", "--p1", "0.5", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert!(doc["generated_unix"].is_u64());
}

#[test]
fn audit_config_errors_exit_2() {
    for fixture in ["too_few_samples.json", "unknown_key.json", "uncertified_strict.json"] {
        let cfg = manifest(&format!("tests/fixtures/{fixture}"));
        let out = run(&["audit", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&out), 2, "{fixture}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn bad_thread_env_exits_2() {
    let out = bin()
        .env("STEIN_AUDIT_THREADS", "many")
        .args(["selfcheck", "lemma-axby"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn selfcheck_runs_and_lists() {
    let out = run(&["selfcheck", "--list"]);
    assert_eq!(code(&out), 0);
    let listing = String::from_utf8(out.stdout).unwrap();
    for name in ["lemma-axby", "t-r-bounds", "incgamma", "ij-caps", "constants-24-17", "constants-187-131-704-468"] {
        assert!(listing.contains(name), "{name} missing from --list");
    }
    assert!(!listing.contains("PASS"));
    let out = run(&["selfcheck"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(code(&run(&["selfcheck", "no-such-suite"])), 2);
}
