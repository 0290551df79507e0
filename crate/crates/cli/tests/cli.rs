use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn valence(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valence")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn line_value(out: &str, key: &str) -> Option<String> {
    out.lines().find_map(|l| l.strip_prefix(key).map(|v| v.trim().to_string()))
}

#[test]
fn count_mpw_golden_values() {
    let o = valence(&["count", "--map", "mpw", "--eta", "0,0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(line_value(&stdout(&o), "N =").as_deref(), Some("10"));
    let o = valence(&["count", "--map", "mpw", "--eta", "10,10"]);
    assert_eq!(line_value(&stdout(&o), "N =").as_deref(), Some("4"));
}

#[test]
fn count_refuses_eta_on_caustic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(valence(&["analyze", "--map", "mpw", "--out", out, "--format", "csv"]).status.success());
    let text = fs::read_to_string(dir.path().join("caustics.csv")).unwrap();
    let row: Vec<&str> = text.lines().nth(40).unwrap().split(',').collect();
    let eta = format!("{},{}", row[2], row[3]);
    let o = valence(&["count", "--map", "mpw", "--eta", &eta]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("caustic"), "{}", stderr(&o));
}

#[test]
fn count_requires_eta() {
    let o = valence(&["count", "--map", "mpw"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn analyze_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = valence(&["analyze", "--map", "nexp", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in [
        "critical_curves.csv",
        "critical_curves.svg",
        "caustics.csv",
        "caustics.svg",
        "indices.json",
        "nondegeneracy.json",
        "phase.csv",
    ] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    // unit circle plus the origin
    let text = fs::read_to_string(dir.path().join("critical_curves.csv")).unwrap();
    for l in text.lines().skip(1) {
        let f: Vec<f64> = l.split(',').skip(3).take(2).map(|x| x.parse().unwrap()).collect();
        assert!((f[0].hypot(f[1]) - 1.0).abs() < 1e-7, "{l}");
    }
    assert!(stdout(&o).contains("isolated critical point 0+0i"));
    let indices: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("indices.json")).unwrap()).unwrap();
    assert_eq!(indices["isolated_critical_points"].as_array().unwrap().len(), 1);
    let svg = fs::read_to_string(dir.path().join("caustics.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
}

#[test]
fn format_flag_restricts_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = valence(&["analyze", "--map", "mpw", "--out", dir.path().to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success());
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, vec!["indices.json", "nondegeneracy.json"]);
}

fn write_spec(dir: &Path, text: &str) -> String {
    let p = dir.join("map.json");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn invalid_spec_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), r#"{"h": {"num": [[0, 0], [1, 0]]}, "g": {"num": [[1, 0]], "den": [[0, 0]]}}"#);
    let o = valence(&["analyze", "--map", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("zero denominator"));
}

#[test]
fn spec_file_map_is_counted() {
    let dir = tempfile::tempdir().unwrap();
    // z^2 + conj(z)
    let path = write_spec(dir.path(), r#"{"h": {"num": [[0, 0], [0, 0], [1, 0]]}, "g": {"num": [[0, 0], [1, 0]]}}"#);
    let o = valence(&["count", "--map", &path, "--eta", "0,0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(line_value(&stdout(&o), "N =").as_deref(), Some("4"));
}

#[test]
fn validate_rejects_coanalytic_dominance() {
    let dir = tempfile::tempdir().unwrap();
    // z + conj(z^2)
    let path = write_spec(dir.path(), r#"{"h": {"num": [[0, 0], [1, 0]]}, "g": {"num": [[0, 0], [0, 0], [1, 0]]}}"#);
    let o = valence(&["validate", "--map", &path, "--samples", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"), "{}", stdout(&o));
    assert!(stdout(&o).contains("non-degeneracy"));
}

#[test]
fn validate_passes_on_catalog_map() {
    let dir = tempfile::tempdir().unwrap();
    let o = valence(&["validate", "--map", "mpw", "--samples", "6", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}\n{}", stdout(&o), stderr(&o));
    for check in ["non-degeneracy", "curvature", "triple-agreement", "index-balance", "parity"] {
        assert!(stdout(&o).contains(&format!("PASS mpw {check}")), "{check}");
    }
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("validate.json")).unwrap()).unwrap();
    assert!(v.as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn injected_fault_surfaces_count_mismatch() {
    let o = valence(&["validate", "--map", "mpw", "--samples", "3", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL mpw triple-agreement"));
    assert!(stdout(&o).contains("counting formula gives"), "{}", stdout(&o));
}

fn tile_counts(map: &str) -> BTreeSet<i64> {
    let o = valence(&["tiles", "--map", map]);
    assert!(o.status.success(), "{}", stderr(&o));
    stdout(&o)
        .lines()
        .filter_map(|l| l.split("N = ").nth(1))
        .map(|r| r.split(',').next().unwrap().parse().unwrap())
        .collect()
}

#[test]
fn tiles_of_catalog_maps() {
    assert_eq!(tile_counts("mpw"), BTreeSet::from([4, 6, 8, 10]));
    assert_eq!(tile_counts("log-example"), BTreeSet::from([2, 4, 6]));
}

#[test]
fn analytic_map_has_single_tile() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_spec(dir.path(), r#"{"h": {"num": [[0, 0], [0, 0], [1, 0]]}, "g": {"num": [[0, 0]]}}"#);
    let o = valence(&["tiles", "--map", &path]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("tile")).count(), 1);
}

#[test]
fn solve_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let a = valence(&["solve", "--map", "wilmshurst:3", "--eta", "0,0", "--out", out, "--format", "csv"]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert!(stdout(&a).contains("pre-images = 9 (formula 9, certified true)"));
    let rows = fs::read_to_string(dir.path().join("preimages.csv")).unwrap();
    assert_eq!(rows.lines().count(), 10);
    let b = valence(&["solve", "--map", "wilmshurst:3", "--eta", "0,0"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn scan_writes_log_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = valence(&[
        "scan", "--map", "mpw", "--eta", "0.001,0.002", "--to", "10,10", "--steps", "50", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("achieved = {4, 6, 8, 10}"), "{}", stdout(&o));
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("scan.json")).unwrap()).unwrap();
    assert_eq!(s["map_id"], "mpw");
    assert!(dir.path().join("scan.csv").is_file());
}

#[test]
fn threads_flag_is_accepted() {
    let o = valence(&["count", "--map", "wilmshurst:3", "--eta", "0,0", "--threads", "2"]);
    assert!(o.status.success());
    assert_eq!(line_value(&stdout(&o), "N =").as_deref(), Some("9"));
}
