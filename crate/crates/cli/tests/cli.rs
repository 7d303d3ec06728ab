use std::process::Command;

use serde_json::Value;
use starlike_cli::{run, EXIT_CONDITION_FAILED, EXIT_OK, EXIT_USAGE};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("starlike").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = invoke(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}\n{err}"));
    (code, v)
}

const BERNARDI_ZERO: [&str; 10] = [
    "--weight", "bernardi", "--c", "0", "--alpha", "1", "--gamma", "0", "--delta", "1",
];

fn with_zeta<'a>(base: &[&'a str]) -> Vec<&'a str> {
    let mut v = base.to_vec();
    v.extend(["--zeta", "0"]);
    v
}

#[test]
fn beta_bernardi_zero() {
    let mut args = vec!["beta"];
    args.extend(with_zeta(&BERNARDI_ZERO));
    let (code, v) = json(&args);
    assert_eq!(code, EXIT_OK);
    let beta = v["results"]["beta"]["beta"].as_f64().unwrap();
    assert!((beta + 0.62944).abs() < 1e-5);
    for key in ["version", "inputs", "results", "certified"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn beta_uniform_all_methods_agree() {
    let base = [
        "beta", "--weight", "uniform", "--alpha", "3", "--gamma", "1", "--delta", "1", "--zeta",
        "0",
    ];
    let mut values = Vec::new();
    for method in ["quadrature", "series", "analytic"] {
        let mut args = base.to_vec();
        args.extend(["--method", method]);
        let (code, v) = json(&args);
        assert_eq!(code, EXIT_OK);
        values.push(v["results"]["beta"]["beta"].as_f64().unwrap());
    }
    for b in &values {
        assert!((b + 1.81637).abs() < 1e-5, "{values:?}");
    }
}

#[test]
fn five_f_four_needs_carlson_shaffer() {
    let (code, _, err) = invoke(&[
        "beta", "--method", "5f4", "--weight", "uniform", "--alpha", "3", "--gamma", "1",
        "--delta", "1", "--zeta", "0",
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("carlson_shaffer"));
    let (code, v) = json(&[
        "beta",
        "--method",
        "5f4",
        "--weight",
        "carlson_shaffer",
        "--b",
        "1",
        "--c",
        "2",
        "--alpha",
        "3",
        "--gamma",
        "1",
        "--delta",
        "1",
        "--zeta",
        "0",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["results"]["beta"]["method"], "closed_form_5F4");
}

#[test]
fn check_bernardi_four_fails_with_margin_minus_one() {
    let (code, v) = json(&[
        "check",
        "--theorem",
        "T4_1",
        "--weight",
        "bernardi",
        "--c",
        "4",
        "--alpha",
        "3",
        "--gamma",
        "1",
        "--delta",
        "1",
        "--zeta",
        "0",
    ]);
    assert_eq!(code, EXIT_CONDITION_FAILED);
    let r = &v["results"]["T4_1_gamma_pos"];
    assert_eq!(r["status"], "failed");
    assert_eq!(r["report"]["margin"].as_f64(), Some(-1.0));
    assert_eq!(v["certified"], false);
}

#[test]
fn check_theorem_branch_mismatch_is_usage_error() {
    let mut args = vec!["check", "--theorem", "T4_1"];
    args.extend(with_zeta(&BERNARDI_ZERO));
    assert_eq!(invoke(&args).0, EXIT_USAGE);
}

#[test]
fn check_all_skips_uncovered() {
    // xi > 0 with gamma = 0 is outside the differential bound
    let (code, v) = json(&[
        "check", "--weight", "bernardi", "--c", "0", "--alpha", "1", "--gamma", "0", "--delta",
        "2", "--zeta", "0.75",
    ]);
    assert_eq!(v["results"]["T4_2_gamma_zero"]["status"], "skipped");
    assert!(code == EXIT_OK || code == EXIT_CONDITION_FAILED);
}

#[test]
fn usage_errors() {
    let mut bad_weight = vec!["beta", "--weight", "nope", "--alpha", "1", "--gamma", "0"];
    bad_weight.extend(["--delta", "1", "--zeta", "0"]);
    assert_eq!(invoke(&bad_weight).0, EXIT_USAGE);
    assert_eq!(invoke(&["beta", "--alpha", "1"]).0, EXIT_USAGE);
    assert_eq!(invoke(&[]).0, EXIT_USAGE);
    // komatu takes k and p, not c
    let (code, _, err) = invoke(&[
        "beta", "--weight", "komatu", "--c", "1", "--alpha", "1", "--gamma", "0", "--delta", "1",
        "--zeta", "0",
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("parameter"));
}

#[test]
fn json_weight_spec() {
    let (code, v) = json(&[
        "beta",
        "--weight",
        r#"{"kind": "bernardi", "params": {"c": 0}}"#,
        "--alpha",
        "1",
        "--gamma",
        "0",
        "--delta",
        "1",
        "--zeta",
        "0",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!((v["results"]["beta"]["beta"].as_f64().unwrap() + 0.62944).abs() < 1e-5);
}

#[test]
fn report_certifies_bernardi_zero() {
    let mut args = vec!["report"];
    args.extend(with_zeta(&BERNARDI_ZERO));
    let (code, v) = json(&args);
    assert_eq!(code, EXIT_OK, "{v:#}");
    assert_eq!(v["certified"], true);
    assert_eq!(v["results"]["disk"]["sharpness"]["status"], "passed");
}

#[test]
fn report_bernardi_four_keeps_starlike_stage() {
    let (code, v) = json(&[
        "report", "--weight", "bernardi", "--c", "4", "--alpha", "3", "--gamma", "1", "--delta",
        "1", "--zeta", "0",
    ]);
    assert_eq!(code, EXIT_CONDITION_FAILED);
    assert_eq!(
        v["results"]["conditions"]["T4_1_gamma_pos"]["status"],
        "failed"
    );
    assert_eq!(v["results"]["disk"]["starlike_margin"]["status"], "passed");
    assert_eq!(v["certified"], false);
}

#[test]
fn report_is_byte_reproducible() {
    let mut args = vec!["report"];
    args.extend(with_zeta(&BERNARDI_ZERO));
    assert_eq!(invoke(&args).1, invoke(&args).1);
}

#[test]
fn transform_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    // (f/z)^delta = 1 + z/2
    std::fs::write(&input, "[[1, 0], [0.5, 0]]").unwrap();
    let out = dir.path().join("out.json");
    let (code, _, _) = invoke(&[
        "transform",
        "--input",
        input.to_str().unwrap(),
        "--weight",
        "bernardi",
        "--c",
        "0",
        "--alpha",
        "1",
        "--gamma",
        "0",
        "--delta",
        "1",
        "--zeta",
        "0",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let t = v["results"]["transformed"].as_array().unwrap();
    assert_eq!(t.len(), 2);
    assert_eq!(t[0][0].as_f64(), Some(1.0));
    // tau_1 = int_0^1 t dt for the uniform weight
    assert!((t[1][0].as_f64().unwrap() - 0.25).abs() < 1e-12);
    let g = v["results"]["G"].as_array().unwrap();
    assert_eq!(g[0][0].as_f64(), Some(0.0));
    assert_eq!(g[1][0].as_f64(), Some(1.0));
}

#[test]
fn transform_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.json");
    std::fs::write(&input, "[[2, 0], [0.5, 0]]").unwrap();
    let (code, _, _) = invoke(&[
        "transform",
        "--input",
        input.to_str().unwrap(),
        "--weight",
        "uniform",
        "--alpha",
        "1",
        "--gamma",
        "0",
        "--delta",
        "1",
        "--zeta",
        "0",
    ]);
    assert_eq!(code, EXIT_USAGE);
    std::fs::write(&input, "not json").unwrap();
    let (code, _, _) = invoke(&[
        "transform",
        "--input",
        input.to_str().unwrap(),
        "--weight",
        "uniform",
        "--alpha",
        "1",
        "--gamma",
        "0",
        "--delta",
        "1",
        "--zeta",
        "0",
    ]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn verify_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    let (code, v) = json(&[
        "verify",
        "--weight",
        "uniform",
        "--alpha",
        "3",
        "--gamma",
        "1",
        "--delta",
        "1",
        "--zeta",
        "0",
        "--grid-radii",
        "6",
        "--grid-angles",
        "16",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{v:#}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,theta,value"));
    assert_eq!(lines.count(), 6 * 16);
}

#[test]
fn verify_above_sharp_beta_is_still_starlike() {
    // a larger beta shrinks the class, so the image stays starlike
    let (code, v) = json(&[
        "verify",
        "--weight",
        "uniform",
        "--alpha",
        "3",
        "--gamma",
        "1",
        "--delta",
        "1",
        "--zeta",
        "0",
        "--beta",
        "0",
        "--grid-radii",
        "8",
        "--grid-angles",
        "32",
    ]);
    assert_eq!(v["results"]["starlike_margin"]["status"], "passed", "{v:#}");
    assert!(code == EXIT_OK || code == EXIT_CONDITION_FAILED);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_starlike");
    let status = Command::new(bin)
        .args([
            "check",
            "--theorem",
            "T4_1",
            "--weight",
            "bernardi",
            "--c",
            "4",
            "--alpha",
            "3",
            "--gamma",
            "1",
            "--delta",
            "1",
            "--zeta",
            "0",
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_CONDITION_FAILED));
    let bad = Command::new(bin)
        .args(["beta", "--bogus"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(!bad.stderr.is_empty());
}
