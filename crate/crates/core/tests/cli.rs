use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qformal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qformal"))
        .args(args)
        .env_remove("QFORMAL_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qformal-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn chsh_singlet_canonical() {
    let out = qformal(&["chsh", "--state", "singlet", "--dirs", "canonical"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    assert!(v["config"]["tolerances"]["violation"].is_number());
}

#[test]
fn entropy_bell_file_in_bits() {
    let s = 0.5f64.sqrt();
    let path = scratch("bell.json");
    let file = serde_json::json!({"rows": 4, "cols": 1, "data": [[s, 0.0], [0.0, 0.0], [0.0, 0.0], [s, 0.0]]});
    std::fs::write(&path, file.to_string()).unwrap();
    let out = qformal(&["entropy", "--state", path.to_str().unwrap(), "--dims", "2,2", "--unit", "bits"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["S_AB"].as_f64().unwrap().abs() < 1e-10);
    assert!((v["S_A"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((v["S_cond_A_given_B"].as_f64().unwrap() + 1.0).abs() < 1e-10);
    assert_eq!(v["config"]["unit"], "bits");
}

#[test]
fn missing_file_is_an_io_error() {
    let out = qformal(&["entropy", "--state", "/nonexistent/state.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/state.json"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors() {
    assert_eq!(qformal(&["chsh", "--tol", "nonsense=1"]).status.code(), Some(2));
    assert_eq!(qformal(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qformal(&["box"]).status.code(), Some(2));
}

#[test]
fn assert_flags_inequality_violations_only() {
    assert_eq!(qformal(&["box", "--pr", "--assert"]).status.code(), Some(1));
    assert_eq!(qformal(&["box", "--deterministic", "1,1,-1,1", "--assert"]).status.code(), Some(0));
    let ks = qformal(&["ks-verify", "cabello18", "--assert"]);
    assert_eq!(ks.status.code(), Some(0));
    assert_eq!(json(&ks)["verdict"], "UNSATISFIABLE");
}

#[test]
fn ks_drop_prints_witness() {
    let v = json(&qformal(&["ks-verify", "cabello18", "--drop", "4"]));
    assert_eq!(v["verdict"], "SATISFIABLE");
    assert_eq!(v["witness"].as_array().unwrap().len(), 18);
}

#[test]
fn output_is_reproducible_across_workers() {
    let args = ["decohere", "--dims", "4,8", "--trials", "150", "--seed", "9"];
    let a = qformal(&[&args[..], &["--workers", "1"]].concat());
    let b = qformal(&[&args[..], &["--workers", "3"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_qformal"))
        .args(&args[..args.len() - 2])
        .env("QFORMAL_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
}

#[test]
fn csv_and_out_file() {
    let path = scratch("rows.csv");
    let out = qformal(&["decohere", "--dims", "4", "--trials", "100", "--output", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("dim,"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn lattice_and_gns_commands() {
    let v = json(&qformal(&["lattice", "audit", "o6"]));
    assert_eq!(v["is_orthomodular"], false);
    let v = json(&qformal(&["lattice", "witness", "--dim", "2"]));
    assert_eq!((v["lhs_rank"].as_u64(), v["rhs_rank"].as_u64()), (Some(1), Some(0)));
    let v = json(&qformal(&["gns", "--blocks", "2", "--state", "tracial"]));
    assert_eq!((v["hilbert_dim"].as_u64(), v["commutant_dim"].as_u64()), (Some(4), Some(4)));
}

#[test]
fn gleason_and_protocol_commands() {
    let v = json(&qformal(&["gleason-fit", "--dim", "3", "--synthetic", "50", "--seed", "4"]));
    assert_eq!(v["verdict"], "consistent");
    assert!(v["recovery_error"].as_f64().unwrap() < 1e-8);

    let pa = scratch("pa.json");
    let pb = scratch("pb.json");
    let h = 0.5;
    std::fs::write(&pa, r#"{"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[0,0]]}"#).unwrap();
    std::fs::write(&pb, format!(r#"{{"rows":2,"cols":2,"data":[[{h},0],[{h},0],[{h},0],[{h},0]]}}"#)).unwrap();
    let out = qformal(&["protocols", "--pa", pa.to_str().unwrap(), "--pb", pb.to_str().unwrap(), "--trials", "20000", "--seed", "7", "--assert"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["analytic_identical"], true);
    assert!((v["forward"]["analytic_prob"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn evolve_command() {
    let hp = scratch("h.json");
    let sp = scratch("psi.json");
    std::fs::write(&hp, r#"{"rows":2,"cols":2,"data":[[0,0],[1,0],[1,0],[0,0]]}"#).unwrap();
    std::fs::write(&sp, r#"{"rows":2,"cols":1,"data":[[1,0],[0,0]]}"#).unwrap();
    let out = qformal(&["evolve", "--hamiltonian", hp.to_str().unwrap(), "--state", sp.to_str().unwrap(), "--time", "1.5707963267948966", "--observable", hp.to_str().unwrap(), "--assert"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let amp = &v["state"]["data"][1];
    assert!((amp[1].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!(v["picture_residual"].as_f64().unwrap() < 1e-10);
}
