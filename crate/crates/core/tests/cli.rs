use std::process::{Command, Output};

use coherence_flow::coherence::coherence_closed_form;
use coherence_flow::evolution::PureState;
use coherence_flow::hamiltonian::HamiltonianParams;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coherence-flow")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn csv_reparses_to_library_values() {
    let text = stdout(&["trace", "--kind", "apt", "--a", "1.5", "--state", "h-sqrt3v", "--t-max", "3", "--samples", "31"]);
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("t,c_closed_form,c_matrix_path"));
    let p = HamiltonianParams::apt(1.5);
    let mut rows = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let want = coherence_closed_form(&PureState::h_sqrt3v(), &p, v[0]).unwrap();
        // twelve significant digits survive the round trip
        assert!((v[1] - want).abs() <= 1e-11 * want.abs().max(1.0));
        assert!((v[1] - v[2]).abs() <= 1e-9);
        rows += 1;
    }
    assert_eq!(rows, 31);
}

#[test]
fn json_has_schema_and_metadata() {
    let v: Value = serde_json::from_str(&stdout(&[
        "trace", "--kind", "pt", "--a", "0.31", "--t-max", "1", "--samples", "5", "--format", "json",
    ]))
    .unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["kind"], "pt");
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);

    let v: Value = serde_json::from_str(&stdout(&["period", "--kind", "apt", "--a", "1.5"])).unwrap();
    assert!((v["period"].as_f64().unwrap() - 2.80992589242).abs() < 1e-11);

    let v: Value = serde_json::from_str(&stdout(&["asymptote", "--kind", "pt", "--a", "2.8"])).unwrap();
    assert!(v.to_string().contains("0.357142857143"));
}

#[test]
fn backflow_and_angles_reports() {
    let v: Value =
        serde_json::from_str(&stdout(&["backflow", "--kind", "pt", "--a", "0.47", "--state", "h-sqrt3v"])).unwrap();
    assert_eq!(v["zeros_per_period"], 4);
    let v: Value = serde_json::from_str(&stdout(&["angles", "--kind", "pt", "--a", "0.31", "--t", "1"])).unwrap();
    assert_eq!(v["elements"].as_array().unwrap().len(), 7);
    assert!(v["residual"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# defaults\nkind = apt\na = 2.8\nt_max = 2\nsamples = 3\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file: Value =
        serde_json::from_str(&stdout(&["--config", cfg, "trace", "--format", "json"])).unwrap();
    assert_eq!(from_file["kind"], "apt");
    assert_eq!(from_file["rows"].as_array().unwrap().len(), 3);
    let overridden: Value =
        serde_json::from_str(&stdout(&["--config", cfg, "trace", "--a", "1.5", "--format", "json"])).unwrap();
    assert_eq!(overridden["a"], 1.5);

    std::fs::write(dir.path().join("bad.conf"), "colour = red\n").unwrap();
    let out = run(&["--config", dir.path().join("bad.conf").to_str().unwrap(), "trace", "--kind", "pt", "--a", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["trace", "--kind", "pt", "--a", "0"]).status.code(), Some(2));
    assert_eq!(run(&["trace", "--kind", "pt"]).status.code(), Some(2));
    assert_eq!(run(&["tomography", "--kind", "pt", "--a", "0.5", "--exposure", "0"]).status.code(), Some(2));
    let out = run(&["trace", "--kind", "pt", "--a", "1", "-o", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(4));
}
