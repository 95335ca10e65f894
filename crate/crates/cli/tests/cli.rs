use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn seqcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqcap"))
        .args(args)
        .env("SEQCAP_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

fn write_model(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(format!("{name}.json"));
    let p = path.to_str().unwrap().to_string();
    let mut full = vec!["model", name];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--output", &p]);
    assert!(seqcap(&full).status.success());
    p
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write_model(dir.path(), "ad", &["--gamma", "0.3"]);
    let o = seqcap(&["validate", &ok]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["passed"], Value::Bool(true));

    let scaled = dir.path().join("scaled.json");
    fs::write(&scaled, r#"{"dim_in":2,"dim_out":2,"kraus":[[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]]}"#).unwrap();
    let o = seqcap(&["validate", scaled.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!((json(&o)["defect"].as_f64().unwrap() - 0.75).abs() < 1e-12);

    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{\"dim_in\": 2,").unwrap();
    let o = seqcap(&["validate", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn pureloss_values() {
    let o = seqcap(&["pureloss", "--eta", "1", "--cutoff", "4", "--k", "1", "--format", "json"]);
    assert_eq!(json(&o)["exact_norm"].as_f64().unwrap(), 0.0);
    let o = seqcap(&["pureloss", "--eta", "0.9", "--cutoff", "4", "--k", "1", "--format", "json"]);
    assert!((json(&o)["exact_norm"].as_f64().unwrap() - 0.0523).abs() < 1e-12);
}

#[test]
fn capacity_rows_and_horizon() {
    let o = seqcap(&["capacity", "--epsilon", "0.0005", "--nmax", "44"]);
    let last = stdout(&o).lines().last().unwrap().to_string();
    assert!(last.starts_with("44,0.80277435075"), "{last}");
    let o = seqcap(&["capacity", "--epsilon", "0.0005", "--find-horizon"]);
    assert_eq!(stdout(&o).trim(), "323");
}

#[test]
fn spectral_reports() {
    let dir = tempfile::tempdir().unwrap();
    let ad = write_model(dir.path(), "ad", &["--gamma", "0.36"]);
    let v = json(&seqcap(&["spectral", &ad, "--nmax", "5"]));
    assert!((v["mu"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    assert!((v["t"][2].as_f64().unwrap() - 0.36).abs() < 1e-12);

    let id = write_model(dir.path(), "identity", &[]);
    assert_eq!(seqcap(&["spectral", &id]).status.code(), Some(3));

    let dep = write_model(dir.path(), "depolarizing", &[]);
    let v = json(&seqcap(&["spectral", &dep, "--nmax", "3"]));
    assert_eq!(v["mu"].as_f64().unwrap(), 0.0);
}

#[test]
fn cly_errbound() {
    let o = seqcap(&["errbound", "--model", "bosonic-ad", "--gamma", "0.01", "--cly", "--format", "json"]);
    let v = json(&o);
    assert!((v["bound_49g2"].as_f64().unwrap() - 0.0049).abs() < 1e-15);
    let exact = v["exact_norm"].as_f64().unwrap();
    assert!(exact <= 0.0049);
    assert!((exact - v["p_formula_max"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn node_with_cly_code() {
    let v = json(&seqcap(&["node", "--cly", "--gamma", "0.01", "--nmax", "8"]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 9);
    assert!(v["rows"][0]["R_n"].is_null());
    assert!(v["epsilon"].as_f64().unwrap() <= 0.0049);
}

#[test]
fn sweep_csv_shape() {
    let o = seqcap(&["sweep", "--model", "ad", "--params", "0.1:0.5:0.1", "--n", "1:10"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 51);
    let bad = seqcap(&["sweep", "--model", "ad", "--params", "0.5:0.1:0.1", "--n", "1"]);
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn demo_passes() {
    let o = seqcap(&["paper-demo"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn repeat_runs_are_identical() {
    let args = ["paper-demo", "--format", "json"];
    assert_eq!(seqcap(&args).stdout, seqcap(&args).stdout);
    let args = ["sweep", "--model", "bosonic-ad", "--params", "0.005,0.01", "--n", "1:5"];
    assert_eq!(seqcap(&args).stdout, seqcap(&args).stdout);
}

#[test]
fn seed_only_moves_sampled_checks() {
    let a = json(&seqcap(&["paper-demo", "--format", "json", "--seed", "1"]));
    let b = json(&seqcap(&["paper-demo", "--format", "json", "--seed", "2"]));
    let (ca, cb) = (a["checks"].as_array().unwrap(), b["checks"].as_array().unwrap());
    assert_eq!(ca.len(), cb.len());
    let mut sampled = 0;
    for (x, y) in ca.iter().zip(cb) {
        assert_eq!(x["check"], y["check"]);
        if x["sampled"] == Value::Bool(true) {
            sampled += 1;
            assert_eq!(y["pass"], Value::Bool(true));
        } else {
            assert_eq!(x, y);
        }
    }
    assert_eq!(sampled, 1);
}

#[test]
fn bad_arguments_exit_one() {
    assert_eq!(seqcap(&["capacity"]).status.code(), Some(1));
    assert_eq!(seqcap(&["--help"]).status.code(), Some(0));
    assert_eq!(seqcap(&["paper-demo", "--gamma", "0.5"]).status.code(), Some(3));
}
