use std::process::{Command, Output};

use serde_json::Value;

fn distext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distext"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json", "--deterministic"]);
    let out = distext(&all);
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid JSON on stdout");
    (v, out.status.code().unwrap())
}

fn assert_schema(v: &Value) {
    for key in ["command", "params", "results", "errors"] {
        assert!(v.get(key).is_some(), "missing key {key}");
    }
}

#[test]
fn tadpole_json() {
    let (v, code) = json(&["tadpole", "--dim", "2", "--mu2", "2", "--m", "1"]);
    assert_eq!(code, 0);
    assert_schema(&v);
    let row = &v["results"][0];
    assert!((row["analytic"].as_f64().unwrap() - 0.055_158_88).abs() < 1e-7);
    assert!(row["abs_error"].as_f64().unwrap() < 1e-8);
    assert!(v.get("metadata").is_none());
}

#[test]
fn domain_error_exit_code() {
    let out = distext(&["tadpole", "--dim", "2", "--mu2", "0.5", "--m", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("μ² > 1"), "{err}");
    // the CSV header is still written
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("dimension,"));

    let (v, code) = json(&["tadpole", "--dim", "4", "--mu2", "0.5"]);
    assert_eq!(code, 3);
    assert_schema(&v);
    assert_eq!(v["errors"].as_array().unwrap().len(), 1);
}

#[test]
fn usage_errors() {
    assert_eq!(
        distext(&["tadpole", "--dim", "3", "--mu2", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(distext(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        distext(&["verify", "--filter", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(
        distext(&["tadpole", "--dim", "2", "--mu2", "2", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn convergence_exit_code() {
    let out = distext(&["series-k0", "--m", "1", "--x", "20", "--k-max", "3"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn series_json() {
    let (v, code) = json(&["series-k0", "--m", "1", "--x", "1", "--tol", "1e-12"]);
    assert_eq!(code, 0);
    let rows = v["results"].as_array().unwrap();
    let last = rows.last().unwrap();
    assert!((last["partial_sum"].as_f64().unwrap() - 0.067_008_06).abs() < 1e-7);
    assert!(last["rel_error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn testfn_csv_samples() {
    let out = distext(&["testfn", "--mu2", "2", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,f_sup,w,f_inf");
    assert_eq!(lines.len(), 513);
    let last_x: f64 = lines[512].split(',').next().unwrap().parse().unwrap();
    assert!((last_x - 4.4).abs() < 1e-12);
    // 17 significant digits
    let field = lines[2].split(',').next().unwrap();
    let mantissa = field.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17);
}

#[test]
fn extend_pauli_villars_samples() {
    let (v, code) = json(&[
        "extend",
        "--scheme",
        "formB",
        "--mu2",
        "2",
        "--samples",
        "3",
        "--x-max",
        "2",
    ]);
    assert_eq!(code, 0);
    for row in v["results"].as_array().unwrap() {
        let x = row["x"].as_f64().unwrap();
        let expect = 1.0 / (x + 1.0) - 1.0 / (x + 2.0);
        assert!((row["value"].as_f64().unwrap() - expect).abs() < 1e-13);
    }
    let out = distext(&["extend", "--scheme", "formA", "--mu2", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_file_and_idempotence() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = distext(&[
            "pv-check",
            "--mu2",
            "4",
            "--m",
            "0.5",
            "--format",
            "json",
            "--deterministic",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: Value = serde_json::from_slice(&ta).unwrap();
    assert!((v["results"][0]["pv_value"].as_f64().unwrap() - 0.110_317_76).abs() < 1e-7);
}

#[test]
fn metadata_only_without_deterministic() {
    let out = distext(&["pv-check", "--mu2", "2", "--format", "json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["metadata"]["generated_unix"].is_u64());
}

#[test]
fn verify_filter_runs_only_ir_rows() {
    let (v, code) = json(&["verify", "--filter", "ir"]);
    assert_eq!(code, 0);
    let rows = v["results"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["group"] == "ir"));
}

#[test]
fn verify_full_suite_reports_every_criterion() {
    let (v, code) = json(&["verify"]);
    let rows = v["results"].as_array().unwrap();
    let mut seen: Vec<i64> = rows
        .iter()
        .map(|r| r["criterion"].as_i64().unwrap())
        .collect();
    seen.dedup();
    assert_eq!(seen, (1..=10).collect::<Vec<_>>());
    let all_pass = rows.iter().all(|r| r["passed"] == true);
    assert_eq!(code, if all_pass { 0 } else { 1 });
}
