use std::path::Path;
use std::process::{Command, Output};

fn catodyne(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catodyne"))
        .args(args)
        .env("CATODYNE_OUT", dir)
        .output()
        .unwrap()
}

#[test]
fn clicks_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = catodyne(dir.path(), &["clicks", "--lo", "cat+:2", "--signal", "fock:1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("clicks.csv")).unwrap();
    assert!(csv.lines().count() > 1);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("clicks.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "clicks");
    assert_eq!(manifest["data_file"], "clicks.csv");
    assert!(manifest["n_max"].as_u64().unwrap() > 0);
    assert_eq!(manifest["eta"], 1.0);
}

#[test]
fn explicit_out_overrides_env() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = catodyne(
        env_dir.path(),
        &[
            "--out",
            flag_dir.path().to_str().unwrap(),
            "prq",
            "--r",
            "0.5",
            "--points",
            "11",
        ],
    );
    assert!(out.status.success());
    assert!(flag_dir.path().join("prq.csv").exists());
    assert!(!env_dir.path().join("prq.csv").exists());
}

#[test]
fn truncation_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = catodyne(dir.path(), &["clicks", "--lo", "coherent:5", "--n-max", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("clicks.csv").exists());
}

#[test]
fn bad_arguments_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = catodyne(dir.path(), &["clicks", "--lo", "cat-:0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = catodyne(dir.path(), &["clicks", "--lo", "sideways:1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = catodyne(dir.path(), &["remote-prep", "--q", "0", "--parity", "-", "--r", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_for_small_oscillator() {
    let dir = tempfile::tempdir().unwrap();
    let out = catodyne(dir.path(), &["verify", "--beta", "1", "--max-total", "12"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["results"]["passed"], true);
}

#[test]
fn verify_fails_below_rounding() {
    let dir = tempfile::tempdir().unwrap();
    let out = catodyne(
        dir.path(),
        &["verify", "--beta", "2", "--max-total", "20", "--tol", "0"],
    );
    // a zero tolerance only passes if every amplitude agrees to the last bit
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.csv.manifest.json")).unwrap()).unwrap();
    let passed = manifest["results"]["passed"].as_bool().unwrap();
    assert_eq!(out.status.success(), passed);
    if !passed {
        assert_eq!(out.status.code(), Some(1));
    }
}
