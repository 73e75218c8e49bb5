use serde_json::Value;
use tms_core::cli::{self, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tms").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn schema() -> jsonschema::JSONSchema {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/tms-output.schema.json");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::options().with_draft(jsonschema::Draft::Draft202012).compile(&doc).unwrap()
}

fn assert_valid(text: &str) -> Value {
    let v: Value = serde_json::from_str(text).unwrap();
    let s = schema();
    if let Err(errors) = s.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("schema violations: {msgs:#?}");
    }
    v
}

const INVOCATIONS: &[&[&str]] = &[
    &["constants"],
    &["zeros", "--mu", "1.9"],
    &["zeros", "--mu", "1.856"],
    &["curve", "--points", "40"],
    &["ladder", "--m", "0.05", "--beta", "0,1", "--n-min", "-3", "--n-max", "5", "--eps", "1"],
    &["hlevels", "--mu", "1.9", "--beta-angle", "0.4"],
    &["detect", "--mu", "1.9", "--beta", "1,1"],
    &["eigenfunction", "--mu", "1.9", "--lambda", "-1,0", "--points", "9"],
    &["verify", "--check", "brackets"],
];

#[test]
fn every_subcommand_emits_schema_valid_json() {
    for args in INVOCATIONS {
        let (code, out, err) = run(args);
        assert_eq!(code, EXIT_OK, "{args:?}: {err}");
        let v = assert_valid(&out);
        assert!(v["meta"]["paper_version_notes"].as_array().is_some_and(|a| !a.is_empty()));
    }
}

#[test]
fn output_is_byte_stable() {
    for args in [&["ladder", "--mu", "1.9"][..], &["detect", "--mu", "1.95", "--beta-angle", "2"][..]] {
        assert_eq!(run(args).1, run(args).1);
    }
}

#[test]
fn ladder_example_shape() {
    let (_, out, _) = run(&["ladder", "--m", "0.05", "--beta", "0,1", "--n-min", "-3", "--n-max", "5", "--eps", "1"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let data = v["data"].as_array().unwrap();
    assert_eq!(data.len(), 9);
    assert_eq!(v["meta"]["regime"], "RealLineZeros");
    assert!((v["meta"]["mu"].as_f64().unwrap() - 2.0 / 1.05).abs() < 1e-15);
    assert!((v["meta"]["derived"]["eta"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-14);
    let first = &data[0];
    assert_eq!(first["n"], -3);
    let lam = first["lambda_n"].as_f64().unwrap();
    let b = first["bracket"].as_array().unwrap();
    assert!(b[0].as_f64().unwrap() < lam && lam < b[1].as_f64().unwrap());
    assert!((first["h_level"].as_f64().unwrap() + 1.0 / (lam * lam)).abs() < 1e-9 / (lam * lam));
}

#[test]
fn csv_has_header_lf_and_full_precision() {
    let (code, out, _) = run(&["hlevels", "--mu", "1.9", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert!(!out.contains('\r'));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("n,lambda_n,h_level"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let mantissa = row[1].trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
    // Round trip is exact.
    let x: f64 = row[1].parse().unwrap();
    assert_eq!(format!("{x:.16e}"), row[1]);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"mu": 1.9, "n_min": 0, "n_max": 1, "quadrature": {"abs_tol": 1e-11}}"#).unwrap();
    let (code, out, err) = run(&["hlevels", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["data"].as_array().unwrap().len(), 2);
    assert_eq!(v["meta"]["tolerances"]["abs_tol"], 1e-11);
    // --m on the command line replaces mu from the file
    let (_, out, _) = run(&["hlevels", "--config", cfg.to_str().unwrap(), "--m", "0.04", "--tol-abs", "1e-9"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["meta"]["m"].as_f64().unwrap() - 0.04).abs() < 1e-15);
    assert_eq!(v["meta"]["tolerances"]["abs_tol"], 1e-9);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let (code, out, _) = run(&["constants", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("mu0,mu1,m0,m1,tol\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["nonsense"]).0, EXIT_USAGE);
    assert_eq!(run(&["ladder", "--mu", "1.9", "--m", "0.1"]).0, EXIT_USAGE);
    assert_eq!(run(&["ladder"]).0, EXIT_USAGE);
    assert_eq!(run(&["ladder", "--mu", "1.2"]).0, EXIT_USAGE);
    assert_eq!(run(&["ladder", "--mu", "2.5"]).0, EXIT_USAGE);
    assert_eq!(run(&["ladder", "--mu", "1.9", "--beta", "0,0"]).0, EXIT_USAGE);
    assert_eq!(run(&["ladder", "--mu", "1.9", "--n-min", "3", "--n-max", "1"]).0, EXIT_USAGE);
    assert_eq!(run(&["ladder", "--mu", "1.9", "--tol-abs", "-1"]).0, EXIT_USAGE);
    assert_eq!(run(&["hlevels", "--mu", "1.9", "--eps", "0"]).0, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
    // A tolerance too tight for the subdivision budget is a numeric failure.
    assert_eq!(
        run(&[
            "eigenfunction",
            "--mu",
            "1.9",
            "--tol-abs",
            "1e-300",
            "--tol-rel",
            "1e-300",
            "--tol-max-subdivisions",
            "1"
        ])
        .0,
        EXIT_NUMERIC
    );
}

#[test]
fn verify_failure_exits_nonzero_and_diagnostics_do_not() {
    let (code, out, _) = run(&["verify", "--check", "spectrum"]);
    assert_eq!(code, EXIT_OK);
    let v = assert_valid(&out);
    let diags = v["data"]["diagnostics"].as_array().unwrap();
    assert!(diags.iter().any(|d| d["name"] == "spectrum.base_eigenvalue_printed" && d["passed"] == false));
}
