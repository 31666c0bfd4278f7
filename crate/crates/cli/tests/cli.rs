//! End-to-end tests of the `krein` binary: every verb, exit codes, and
//! report determinism.

use krein_core::fixtures::antidiag4_pair;
use krein_core::json::{ColligationJson, PairJson};
use serde_json::{json, Value};
use std::path::Path;
use std::process::{Command, Output};

fn krein(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_krein"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn flip_colligation_json() -> Value {
    json!({
        "state": {"dim": 1, "kappa": 0},
        "T": [[[0.0, 0.0]]],
        "F": [[[1.0, 0.0]]],
        "G": [[[1.0, 0.0]]],
        "H": [[[0.0, 0.0]]],
    })
}

#[test]
fn weyl_of_reference_pair() {
    let dir = tempfile::tempdir().unwrap();
    let bp = antidiag4_pair().unwrap();
    let pair_json = serde_json::to_value(PairJson::from_pair(&bp)).unwrap();
    let path = write(dir.path(), "pair.json", &pair_json);
    let out = krein(&["weyl", "--pair", &path, "--lambda", "0.5"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let theta = &report["theta"];
    // first row of the closed form at 1/2: (1/3, 1/3, 1/6)
    assert!((theta[0][0][0].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert!((theta[0][1][0].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert!((theta[0][2][0].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-9);
    assert!((theta[2][0][0].as_f64().unwrap() - 8.0 / 3.0).abs() < 1e-9);
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // a valid colligation passes with exit 0
    let good = write(
        dir.path(),
        "good.json",
        &json!({"colligation": flip_colligation_json()}),
    );
    let out = krein(&["validate", "--input", &good]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], json!(true));
    assert_eq!(report["closely_connected"], json!(true));

    // breaking one block entry fails validation with exit 2
    let mut bad = flip_colligation_json();
    bad["H"] = json!([[[0.5, 0.0]]]);
    let bad = write(dir.path(), "bad.json", &json!({"colligation": bad}));
    let out = krein(&["validate", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));

    // malformed JSON is a usage/parse error: exit 1
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{not json").unwrap();
    let out = krein(&["validate", "--input", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn negsq_counts_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    // identity function via taylor data: coefficients [0, 1, 0, 0, 0]
    let zero = json!([[[0.0, 0.0]]]);
    let one = json!([[[1.0, 0.0]]]);
    let rational = json!({
        "rational": {
            "taylor": [zero, one, zero, zero, zero],
            "center": [0.0, 0.0],
            "alpha": [0.0, 0.0],
        }
    });
    let path = write(dir.path(), "lambda.json", &rational);
    let out = krein(&["negsq", "--theta", &path, "--seed", "3"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["count"], json!(0));
    assert_eq!(report["stabilized"], json!(true));
    // byte-identical reports for identical inputs and seed
    let out2 = krein(&["negsq", "--theta", &path, "--seed", "3"]);
    assert_eq!(out.stdout, out2.stdout);
}

#[test]
fn extend_resolvent_and_realize() {
    let dir = tempfile::tempdir().unwrap();
    let pair = write(
        dir.path(),
        "pair.json",
        &json!({
            "H": {"dim": 1, "kappa": 0},
            "L1": 1, "L2": 1,
            "backing": "colligation",
            "colligation": flip_colligation_json(),
        }),
    );
    let phi = write(
        dir.path(),
        "phi.json",
        &json!({
            "param_dim": 1,
            "Phi1": [[[1.0, 0.0]]],
            "Phi2": [[[0.3333333333333333, 0.0]]],
        }),
    );
    let out = krein(&["extend", "--pair", &pair, "--phi", &phi]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["dim"], json!(1));
    assert_eq!(report["contractive"], json!(true));

    let out = krein(&[
        "resolvent",
        "--pair",
        &pair,
        "--phi",
        &phi,
        "--lambda",
        "0.5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let value = report["value"][0][0][0].as_f64().unwrap();
    assert!((value + 6.0).abs() < 1e-8, "resolvent value {value}");
    assert_eq!(report["pass"], json!(true));

    // coresolvent branch at z = 1/4: 12/11
    let out = krein(&[
        "resolvent",
        "--pair",
        &pair,
        "--phi",
        &phi,
        "--lambda",
        "0.25",
        "--co",
    ]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let value = report["value"][0][0][0].as_f64().unwrap();
    assert!((value - 12.0 / 11.0).abs() < 1e-8);

    // realization of the reciprocal function through the shifted pipeline
    let coeffs: Vec<Value> = (0..9)
        .map(|k| json!([[[2.0 * (-2.0f64).powi(k), 0.0]]]))
        .collect();
    let realize_input = write(
        dir.path(),
        "recip.json",
        &json!({"taylor": coeffs, "center": [0.5, 0.0], "alpha": [0.5, 0.0]}),
    );
    let out = krein(&["realize", "--input", &realize_input]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["kappa"], json!(1));
}

#[test]
fn kernel_and_gencores_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let bp = antidiag4_pair().unwrap();
    let pair = write(
        dir.path(),
        "pair.json",
        &serde_json::to_value(PairJson::from_pair(&bp)).unwrap(),
    );
    let out = krein(&[
        "kernel",
        "--pair",
        &pair,
        "--lambda",
        "0.5",
        "--mu",
        "0.3333333333333333",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["identity_residual"].as_f64().unwrap() < 1e-9);

    // couple a small Hilbert base with a constant unimodular parameter
    let base = krein_core::fixtures::random_ordinary_pair(5, 3, 0, 1);
    let base_path = write(
        dir.path(),
        "base.json",
        &serde_json::to_value(PairJson::from_pair(&base)).unwrap(),
    );
    let theta0 =
        krein_core::linalg::CMatrix::from_row_slice(1, 1, &[krein_core::linalg::c(0.6, 0.8)]);
    let par = krein_core::boundary::BoundaryPair::from_colligation(
        krein_core::colligation::UnitaryColligation::empty_state(theta0).unwrap(),
    )
    .unwrap();
    let par_path = write(
        dir.path(),
        "par.json",
        &serde_json::to_value(PairJson::from_pair(&par)).unwrap(),
    );
    let mut done = false;
    for z in ["0.2,0.05", "0.31,-0.11", "-0.17,0.2", "0.12,0.33"] {
        let out = krein(&[
            "gencores",
            "--base",
            &base_path,
            "--parameter",
            &par_path,
            "--z",
            z,
        ]);
        if !out.status.success() {
            continue;
        }
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(report["residual_vs_compression"].as_f64().unwrap() < 1e-8);
        done = true;
        break;
    }
    assert!(done, "no admissible gencores point found");
}

#[test]
fn colligation_round_trip_via_files() {
    let dir = tempfile::tempdir().unwrap();
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let col = krein_core::colligation::UnitaryColligation::random(&mut rng, 3, 1, 2);
    let path = write(
        dir.path(),
        "col.json",
        &json!({"colligation": serde_json::to_value(ColligationJson::from_colligation(&col)).unwrap()}),
    );
    let out = krein(&["validate", "--input", &path]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["max_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn output_flag_and_suite_determinism_probe() {
    let dir = tempfile::tempdir().unwrap();
    let zero = json!([[[0.0, 0.0]]]);
    let one = json!([[[1.0, 0.0]]]);
    let rational = json!({
        "rational": {
            "taylor": [zero.clone(), one, zero.clone(), zero.clone(), zero.clone()],
            "center": [0.0, 0.0],
            "alpha": [0.0, 0.0],
        }
    });
    let theta = write(dir.path(), "theta.json", &rational);
    let out_path = dir.path().join("report.json");
    let out = krein(&[
        "negsq",
        "--theta",
        &theta,
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["count"], json!(0));
    // effective tolerances are recorded in the header
    assert!(report["header"]["tolerances"]["rank"].as_f64().unwrap() > 0.0);
}
