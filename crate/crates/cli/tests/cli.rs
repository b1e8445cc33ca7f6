use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

use opmono_cli::{run, EXIT_NEGATIVE, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn opmono(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["opmono"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stdout))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SCALAR_2I: &str = r#"{"n":2,"entries":[[[2,0],[0,0]],[[0,0],[2,0]]]}"#;
const COMPLEX_3: &str =
    r#"{"n":3,"entries":[[[1,0],[0.5,0.2],[0,0]],[[0.5,-0.2],[2,0],[0,1]],[[0,0],[0,-1],[3,0]]]}"#;

#[test]
fn check_fn_exp_passes() {
    let o = opmono(&["check-fn", "exp"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v = json(&o);
    assert_eq!(v["positivity_ok"], true);
    assert_eq!(v["strict_increase_ok"], true);
    assert_eq!(v["log_concavity_ok"], true);
    assert_eq!(v["failing_points"].as_array().unwrap().len(), 0);
}

#[test]
fn check_fn_custom_grid() {
    let o = opmono(&["check-fn", "pow:p=3", "--grid-lo", "0.5", "--grid-hi", "4", "--grid-n", "8"]);
    assert_eq!(o.code, EXIT_OK);
    let o = opmono(&["check-fn", "pow:p=2", "--grid-lo", "-1"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("outside the domain"));
    let o = opmono(&["check-fn", "exp", "--grid-n", "2"]);
    assert_eq!(o.code, EXIT_USAGE);
}

#[test]
fn bad_function_specs() {
    for spec in ["sin", "pow", "pow:p=abc", "pow:p=1", "pow:p=0.5", "exp:q=1"] {
        let o = opmono(&["check-fn", spec]);
        assert_eq!(o.code, EXIT_USAGE, "{spec}");
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn witness_exp() {
    let o = opmono(&["witness", "exp", "--x", "0", "--y", "1"]);
    assert_eq!(o.code, EXIT_OK);
    let v = json(&o);
    assert!((v["L_det"].as_f64().unwrap() + 0.23421).abs() < 1e-5);
    assert!(v["delta"].as_f64().unwrap() > 0.0);
    assert!(v["t0"].as_f64().unwrap() > 0.0);
    assert_eq!(v["lambda"].as_array().unwrap().len(), 2);

    let o = opmono(&["witness", "exp", "--x", "-1.5", "--y", "0.25"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(json(&o)["x"], -1.5);

    let o = opmono(&["witness", "pow:p=2", "--x", "2", "--y", "2"]);
    assert_eq!(o.code, EXIT_USAGE);
    let o = opmono(&["witness", "pow:p=2", "--x", "-2", "--y", "2"]);
    assert_eq!(o.code, EXIT_USAGE);
}

#[test]
fn decide_scalar_is_central() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "scalar2I.json", SCALAR_2I);
    let o = opmono(&["decide", "pow:p=2", "--matrix", &m]);
    assert_eq!(o.code, EXIT_OK);
    let v = json(&o);
    assert_eq!(v["verdict"], "Central");
    assert!(v["certificate"].is_null());
}

#[test]
fn decide_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "a.json", COMPLEX_3);
    let o = opmono(&["decide", "exp", "--matrix", &m]);
    assert_eq!(o.code, EXIT_NEGATIVE);
    let v = json(&o);
    assert_eq!(v["verdict"], "NonCentral");
    let cert = &v["certificate"];
    assert!(cert["neg_eig"].as_f64().unwrap() < 0.0);

    // Whole verdict and bare certificate are both accepted.
    let verdict_path = write(dir.path(), "verdict.json", &o.stdout);
    let cert_path = write(dir.path(), "cert.json", &cert.to_string());
    for c in [&verdict_path, &cert_path] {
        let r = opmono(&["verify", "exp", "--matrix", &m, "--cert", c]);
        assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
        assert_eq!(json(&r)["valid"], true);
    }

    // Tampered certificate: flip B.
    let mut bad = cert.clone();
    for row in bad["B"]["entries"].as_array_mut().unwrap() {
        for z in row.as_array_mut().unwrap() {
            for part in z.as_array_mut().unwrap() {
                *part = Value::from(-part.as_f64().unwrap());
            }
        }
    }
    let bad_path = write(dir.path(), "bad.json", &bad.to_string());
    let r = opmono(&["verify", "exp", "--matrix", &m, "--cert", &bad_path]);
    assert_eq!(r.code, EXIT_NEGATIVE);
    assert_eq!(json(&r)["valid"], false);
    assert!(r.stderr.contains("not PSD"));

    // Wrong function for the certificate.
    let r = opmono(&["verify", "pow:p=2", "--matrix", &m, "--cert", &cert_path]);
    assert_eq!(r.code, EXIT_NEGATIVE);

    // A central verdict has nothing to verify.
    let s = write(dir.path(), "s.json", SCALAR_2I);
    let central = opmono(&["decide", "exp", "--matrix", &s]);
    let central_path = write(dir.path(), "central.json", &central.stdout);
    let r = opmono(&["verify", "exp", "--matrix", &s, "--cert", &central_path]);
    assert_eq!(r.code, EXIT_USAGE);
}

#[test]
fn decide_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let o = opmono(&["decide", "exp", "--matrix", missing.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_USAGE);

    let garbage = write(dir.path(), "g.json", "{not json");
    assert_eq!(opmono(&["decide", "exp", "--matrix", &garbage]).code, EXIT_USAGE);

    let asym = write(dir.path(), "asym.json", r#"{"n":2,"entries":[[[1,0],[2,0]],[[3,0],[1,0]]]}"#);
    let o = opmono(&["decide", "exp", "--matrix", &asym]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("not Hermitian"));

    let negative = write(dir.path(), "neg.json", r#"{"n":2,"entries":[[[-1,0],[0,0]],[[0,0],[1,0]]]}"#);
    let o = opmono(&["decide", "pow:p=2", "--matrix", &negative]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("outside the domain"));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(opmono(&[]).code, EXIT_USAGE);
    assert_eq!(opmono(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(opmono(&["witness", "exp", "--x", "0"]).code, EXIT_USAGE);
    let h = opmono(&["--help"]);
    assert_eq!(h.code, EXIT_OK);
    assert!(h.stdout.contains("check-fn"));
}

#[test]
fn batch_reports_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let csv_s = csv.to_str().unwrap();
    let o = opmono(&["batch", "pow:p=2", "--n", "5", "--count", "12", "--seed", "3", "--csv", csv_s]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v = json(&o);
    assert_eq!(v["aggregates"]["count"], 12);
    assert_eq!(v["aggregates"]["verified_fraction"], 1.0);
    assert_eq!(v["instances"].as_array().unwrap().len(), 12);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "seed,n,width,delta,t0,neg_eig,verified");
    assert_eq!(text.lines().count(), 13);

    // Same seed: byte-identical JSON and CSV.
    let csv2 = dir.path().join("b2.csv");
    let again = opmono(&["batch", "pow:p=2", "--n", "5", "--count", "12", "--seed", "3", "--csv", csv2.to_str().unwrap()]);
    assert_eq!(again.stdout, o.stdout);
    assert_eq!(std::fs::read(&csv2).unwrap(), text.as_bytes());
}

#[test]
fn batch_edge_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    let o = opmono(&["batch", "exp", "--n", "3", "--count", "0", "--seed", "1", "--csv", empty.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(std::fs::read_to_string(&empty).unwrap(), "seed,n,width,delta,t0,neg_eig,verified\n");

    let one = dir.path().join("one.csv");
    let o = opmono(&["batch", "exp", "--n", "3", "--count", "1", "--seed", "1", "--csv", one.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(std::fs::read_to_string(&one).unwrap().lines().count(), 2);

    assert_eq!(opmono(&["batch", "exp", "--n", "1", "--count", "1", "--seed", "1"]).code, EXIT_USAGE);

    let unwritable = dir.path().join("missing-dir").join("x.csv");
    let o = opmono(&["batch", "exp", "--n", "3", "--count", "1", "--seed", "1", "--csv", unwritable.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_NUMERICAL);
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opmono"))
}

#[test]
fn binary_pipes_decide_into_verify() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "a.json", COMPLEX_3);
    for function in ["exp", "pow:p=1.5", "pow:p=3"] {
        let decided = binary().args(["decide", function, "--matrix", &m]).output().unwrap();
        assert_eq!(decided.status.code(), Some(EXIT_NEGATIVE));

        let mut verify = binary()
            .args(["verify", function, "--matrix", &m, "--cert", "-"])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .unwrap();
        verify.stdin.take().unwrap().write_all(&decided.stdout).unwrap();
        let verified = verify.wait_with_output().unwrap();
        assert_eq!(verified.status.code(), Some(EXIT_OK), "{function}");
        let v: Value = serde_json::from_slice(&verified.stdout).unwrap();
        assert_eq!(v["valid"], true);
    }
}

#[test]
fn binary_respects_dimension_cap() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "a.json", COMPLEX_3);
    let capped = binary()
        .env("OPMONO_MAX_N", "2")
        .args(["decide", "exp", "--matrix", &m])
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("OPMONO_MAX_N"));

    let batch = binary()
        .env("OPMONO_MAX_N", "4")
        .args(["batch", "exp", "--n", "5", "--count", "1", "--seed", "0"])
        .output()
        .unwrap();
    assert_eq!(batch.status.code(), Some(EXIT_USAGE));

    let ok = binary()
        .env("OPMONO_MAX_N", "3")
        .args(["decide", "exp", "--matrix", &m])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_NEGATIVE));
}
