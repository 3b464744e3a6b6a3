use std::path::Path;
use std::process::{Command, Output};

use nilnet::io::parse_points_csv;
use nilnet::rational::q;

fn nilnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilnet")).args(args).output().expect("binary runs")
}

fn groups(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../groups").join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn check_exit_codes() {
    let ok = nilnet(&["check", "--group", &groups("filiform.group")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("p4 = "));

    let bad = nilnet(&["check", "--group", &groups("jacobi-violation.group")]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("Jacobi"));

    let missing = nilnet(&["check", "--group", "no-such-group"]);
    assert_eq!(missing.status.code(), Some(2));
    let window = nilnet(&["net", "--window", "[0,1]^2"]);
    assert_eq!(window.status.code(), Some(2));
}

#[test]
fn net_csv_is_the_lambda_lattice() {
    let o = nilnet(&["net", "--group", "heisenberg", "--lambda", "2,1,1", "--window", "[-2,2]x[0,1]x[0,0]"]);
    assert!(o.status.success());
    let pts = parse_points_csv(&stdout(&o)).unwrap();
    let want: Vec<Vec<_>> = [-2, 0, 2].iter().flat_map(|&x| [0, 1].map(|y| vec![q(x), q(y), q(0)])).collect();
    assert_eq!(pts, want);
}

#[test]
fn dyadic_tile_and_description() {
    let o = nilnet(&["dyadic", "--level", "2", "--base", "4,0,-8"]);
    assert!(o.status.success());
    assert_eq!(parse_points_csv(&stdout(&o)).unwrap().len(), 64);

    let o = nilnet(&["dyadic", "--describe", "--window", "[0,3]^3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(!text.is_empty() && text.lines().all(|l| l.starts_with("+ ") || l.starts_with("- ")));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["perimeter", "--method", "neighborhood", "--samples", "4000", "--seed", "9", "--window", "[0,2]^3"];
    assert_eq!(stdout(&nilnet(&args)), stdout(&nilnet(&args)));
    let qc = ["qc", "--window", "[-6,6]^3", "--format", "records"];
    assert_eq!(stdout(&nilnet(&qc)), stdout(&nilnet(&qc)));
}

#[test]
fn strong_bd_verdicts() {
    assert_eq!(nilnet(&["strongbd", "--against", "exotic"]).status.code(), Some(0));
    assert_eq!(nilnet(&["strongbd", "--against", "halfspace", "--max-level", "4"]).status.code(), Some(1));
}

#[test]
fn render_and_experiment_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = nilnet(&["render", "--group", "heisenberg", "--levels", "1", "--carnot", "--out", out]);
    assert!(o.status.success());
    let mut names: Vec<String> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(names.len(), 6, "{names:?}");
    assert!(names.iter().all(|n| n.starts_with("tile-carnot-") && n.ends_with(".svg")));

    let o = nilnet(&["experiment", "lambda-density", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let records = std::fs::read_to_string(dir.path().join("lambda-density.jsonl")).unwrap();
    assert_eq!(records.lines().count(), 4);
    assert!(stdout(&o).ends_with("verdict PASS\n"));
}

#[test]
fn exotic_manifest_and_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = nilnet(&["exotic", "--verify", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["i_max"], 2);
    assert_eq!(manifest["balls"].as_array().unwrap().len(), 2);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verification.json")).unwrap()).unwrap();
    assert_eq!(report["strong_bd"]["pass"], true);
}
