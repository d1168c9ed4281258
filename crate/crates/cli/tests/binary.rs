use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nwv_cli::config::ExperimentConfig;
use nwv_cli::emit::{parse_sweep_csv, SWEEP_HEADER};

fn nwv(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nwv")).args(args).current_dir(dir).output().unwrap()
}

fn write_config(dir: &Path, name: &str, cfg: &ExperimentConfig) -> String {
    let path = dir.join(name);
    fs::write(&path, cfg.to_json()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn reference_sweep_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "angle_sweep.json", &ExperimentConfig::reference_qubit_sweep(0.01));
    let out = dir.path().join("rows.csv");
    let status = nwv(&["sweep", &cfg, "--out", out.to_str().unwrap()], dir.path());
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));

    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), SWEEP_HEADER.join(","));
    let rows = parse_sweep_csv(&text).unwrap();
    assert_eq!(rows.len(), 721);
    assert!(rows[600].diverged);
    assert!(text.lines().nth(601).unwrap().ends_with(",,,,,,,,,true"));
}

#[test]
fn sweep_json_matches_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::reference_qubit_sweep(0.05);
    c.sweep.as_mut().unwrap().steps = 7;
    let cfg = write_config(dir.path(), "c.json", &c);
    let csv = nwv(&["sweep", &cfg], dir.path());
    let json = nwv(&["sweep", &cfg, "--format", "json"], dir.path());
    let rows = parse_sweep_csv(&String::from_utf8(csv.stdout).unwrap()).unwrap();
    let values: Vec<serde_json::Value> = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(values.len(), rows.len());
    for (v, r) in values.iter().zip(&rows) {
        assert_eq!(v["gamma"].as_f64(), Some(r.gamma));
        assert_eq!(v["nwv_exact"].as_f64(), r.nwv_exact);
        assert_eq!(v["diverged"].as_bool(), Some(r.diverged));
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = ExperimentConfig::reference_qubit_sweep(0.01);
    bad.postselect_index = 5;
    let bad = write_config(dir.path(), "bad.json", &bad);
    let out = nwv(&["validate", &bad], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("postselect_index"));

    fs::write(dir.path().join("broken.json"), "{").unwrap();
    assert_eq!(nwv(&["validate", "broken.json"], dir.path()).status.code(), Some(2));
    assert_eq!(nwv(&["validate", "absent.json"], dir.path()).status.code(), Some(4));

    let good = write_config(dir.path(), "good.json", &ExperimentConfig::reference_qubit_sweep(0.01));
    let out = nwv(&["validate", &good], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let out = nwv(&["sweep", &good, "--out", "no/such/dir/rows.csv"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no/such/dir/rows.csv"));

    // The reference sweep has no montecarlo block.
    assert_eq!(nwv(&["trajectories", &good], dir.path()).status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::reference_qubit_sweep(0.0);
    c.sweep = None;
    c.initial_state = vec![[0.0, 0.0], [1.0, 0.0]];
    c.calibration = nwv_cli::config::CalibrationSpec::Explicit { scale: 1.0, offset: 0.0 };
    // Nothing clicks and the system always ends in the postselected level.
    let cfg = write_config(dir.path(), "null.json", &c);
    let other = write_config(dir.path(), "null2.json", &c);
    assert_eq!(nwv(&["discriminate", &cfg, &other], dir.path()).status.code(), Some(3));
}

#[test]
fn discrimination_mismatch_lists_fields() {
    let dir = tempfile::tempdir().unwrap();
    let a = ExperimentConfig::reference_qubit_sweep(0.01);
    let mut b = a.clone();
    b.tunneling.probs = Some(vec![0.0, 0.02]);
    let a = write_config(dir.path(), "a.json", &a);
    let b = write_config(dir.path(), "b.json", &b);
    let out = nwv(&["discriminate", &a, &b], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tunneling"));
}
