use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsl-frontier")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn staircase_csv_has_one_row_per_grid_point() {
    let o = run(&["staircase", "--n", "20", "--grid", "2001", "--format", "csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eta,d_cert,smooth_bound");
    assert_eq!(lines.len(), 2002);
    assert!(lines[2001].starts_with("1.0000000000000000e0,20,20"));
}

#[test]
fn single_qubit_staircase_is_flat() {
    let text = String::from_utf8(run(&["staircase", "--n", "1", "--grid", "50"]).stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(1) == Some("1")));
}

#[test]
fn staircase_json_carries_the_same_data() {
    let csv = String::from_utf8(run(&["staircase", "--n", "20", "--grid", "101"]).stdout).unwrap();
    let doc = stdout_json(&run(&["staircase", "--n", "20", "--grid", "101", "--format", "json"]));
    assert_eq!(doc["schema"], 1);
    let points = doc["points"].as_array().unwrap();
    assert_eq!(points.len(), 101);
    for (row, p) in csv.lines().skip(1).zip(points) {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[0].parse::<f64>().unwrap(), p["eta"].as_f64().unwrap());
        assert_eq!(f[1].parse::<u64>().unwrap(), p["d_cert"].as_u64().unwrap());
        assert_eq!(f[2].parse::<u64>().unwrap(), p["smooth_bound"].as_u64().unwrap());
    }
}

#[test]
fn staircase_to_unwritable_path_fails() {
    let o = run(&["staircase", "--n", "3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot write"));
}

#[test]
fn certify_examples() {
    let c = stdout_json(&run(&["certify", "--n", "20", "--eta", "0.8"]));
    assert_eq!(c["depth_certified"], 20);
    assert_eq!(c["genuine_npartite"], true);
    let c = stdout_json(&run(&["certify", "--n", "20", "--eta", "0.5"]));
    assert_eq!((c["m_max"].as_u64(), c["depth_certified"].as_u64()), (Some(4), Some(5)));
    let o = run(&["certify", "--n", "20", "--eta", "1.01"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_cluster_flips() {
    let d = stdout_json(&run(&["simulate", "--cluster-flip", "--n", "8", "--m", "2", "--t", "1.0"]));
    assert_eq!(d["schema"], 1);
    assert_eq!(d["charging"]["status"], "charged");
    assert!((d["qsl"]["eta"].as_f64().unwrap() - 0.5f64.sqrt()).abs() <= 1e-9);
    assert_eq!(d["depth"]["ent_u"], 4);
    assert_eq!(d["certificate"]["depth_certified"], 4);

    let d = stdout_json(&run(&["simulate", "--cluster-flip", "--n", "6", "--m", "6"]));
    assert!((d["qsl"]["eta"].as_f64().unwrap() - 1.0 / 6f64.sqrt()).abs() <= 1e-9);
    assert_eq!(d["depth"]["ent_u"], 1);
}

#[test]
fn diagonal_hamiltonian_reports_not_charged() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("h.json");
    std::fs::write(&spec, r#"{"type":"battery","n":3}"#).unwrap();
    let o = run(&["simulate", "--hamiltonian", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let d: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(d["charging"]["status"], "not_charged");
    assert!(d["qsl"].is_null() && d["certificate"].is_null());
}

#[test]
fn custom_dense_spec_and_side_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("x.json");
    // g·σx with g = π/2: charges at T = 1.
    let g = std::f64::consts::FRAC_PI_2;
    std::fs::write(&spec, format!(r#"{{"type":"custom_dense","n":1,"matrix":[[0,0],[{g},0],[{g},0],[0,0]]}}"#))
        .unwrap();
    let traj = dir.path().join("traj.csv");
    let depth = dir.path().join("depth.csv");
    let out = dir.path().join("out.json");
    let o = run(&[
        "simulate",
        "--hamiltonian",
        spec.to_str().unwrap(),
        "--trajectory-csv",
        traj.to_str().unwrap(),
        "--depth-csv",
        depth.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let d: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((d["charging"]["T"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((d["qsl"]["eta"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let t = std::fs::read_to_string(&traj).unwrap();
    assert!(t.starts_with("t,fidelity_to_target,fs_speed,energy\n"));
    assert_eq!(t.lines().count(), 1 + 201);
    assert!(Path::new(&depth).exists());
}

#[test]
fn bad_inputs() {
    assert_eq!(run(&["simulate"]).status.code(), Some(2));
    assert_eq!(run(&["staircase"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["simulate", "--cluster-flip", "--n", "13", "--m", "1"]).status.code(), Some(1));
    assert_eq!(run(&["certify", "--n", "4", "--eta", "0.5", "--eps-p=-1"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("bad.json");
    std::fs::write(&spec, r#"{"type":"custom_dense","n":1,"matrix":[[0,0],[1,0],[2,0],[0,0]]}"#).unwrap();
    let o = run(&["simulate", "--hamiltonian", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Hermitian"));
}

#[test]
fn verify_single_qubit_passes() {
    let d = stdout_json(&run(&["verify", "--n-max", "1", "--trials", "10"]));
    assert_eq!(d["schema"], 1);
    assert_eq!(d["passed"], true);
}

#[test]
fn verify_is_byte_identical_across_runs() {
    let args = ["verify", "--n-max", "3", "--trials", "8", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_covers_every_block_number() {
    let o = run(&["sweep", "--n-max", "4", "--threads", "1"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 10);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}
