use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use cpnsurf_cli::config::ModelConfig;
use serde_json::Value;

fn cpnsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpnsurf")).args(args).output().expect("binary runs")
}

fn cpnsurf_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpnsurf")).args(args).env(key, val).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("model.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

#[test]
fn verify_properties_report_twelve_groups() {
    let out = cpnsurf(&["verify", "--n", "3", "--curve", "veronese", "--filter", "P3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let reports: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    let groups: BTreeSet<String> =
        reports.iter().map(|r| r["id"].as_str().unwrap().split('.').nth(1).unwrap().to_string()).collect();
    assert_eq!(groups.len(), 12);
    assert!(reports.iter().all(|r| r["pass"] == Value::Bool(true)));
}

#[test]
fn invalid_n_exits_with_config_error() {
    let out = cpnsurf(&["verify", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n must be ≥ 2"));
}

#[test]
fn malformed_config_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"n": 3, "sheet": "two"}"#);
    assert_eq!(cpnsurf(&["verify", "--config", &cfg]).status.code(), Some(2));
    let missing = dir.path().join("absent.json");
    assert_eq!(cpnsurf(&["verify", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn seeded_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = cpnsurf(&["verify", "--seed", "7", "--filter", "P2.2", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = dir.path().join("c.json");
    cpnsurf_env(&["verify", "--seed", "7", "--filter", "P2.2", "--out", c.to_str().unwrap()], "CPNSURF_THREADS", "1");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
    let d = dir.path().join("d.json");
    cpnsurf(&["verify", "--seed", "8", "--filter", "P2.2", "--out", d.to_str().unwrap()]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&d).unwrap());
}

#[test]
fn negative_controls_do_not_fail_the_run() {
    let out = cpnsurf(&["verify", "--filter", "NEG"]);
    assert_eq!(out.status.code(), Some(0));
    let reports: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(reports.len() >= 3);
    assert!(reports.iter().all(|r| r["min_residual"].as_f64().unwrap() > 1e-3));
}

#[test]
fn tolerance_override_reaches_reports() {
    let out = cpnsurf(&["verify", "--filter", "P2.1", "--tolerance", "1e-12"]);
    let reports: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(reports.iter().all(|r| r["tolerance"].as_f64() == Some(1e-12)));
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"n": 4, "sheet": 2, "seed": 11, "spectral": {"lambda": [0.0, 2.0], "tau": 0.75},
                   "grid": {"center": [0.5, -0.5], "radius": 1.0, "resolution": 8}}"#;
    let a = ModelConfig::load(Path::new(&write_config(dir.path(), body))).unwrap();
    let b = ModelConfig::from_json(&a.to_json()).unwrap();
    assert_eq!(a, b);
    assert_eq!(ModelConfig::from_json(&b.to_json()).unwrap(), b);
}

#[test]
fn n2_surface_lies_on_killing_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let out = cpnsurf(&["surface", "--n", "2", "--sheet", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&std::fs::read_to_string(dir.path().join("surface_k0.csv")).unwrap());
    assert_eq!(header, ["re_xi", "im_xi", "x1", "x2", "x3"]);
    assert_eq!(rows.len(), 64 * 64);
    for r in &rows {
        let norm2: f64 = r[2..].iter().map(|x| x.parse::<f64>().unwrap().powi(2)).sum();
        assert!((norm2 - 0.25).abs() <= 1e-9);
    }
    let obj = std::fs::read_to_string(dir.path().join("surface_k0.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 64 * 64);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 2 * 63 * 63);
}

#[test]
fn surface_for_higher_n_writes_csv_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"n": 3, "sheet": "all", "grid": {"resolution": 5}}"#);
    let out_dir = dir.path().join("out");
    let out = cpnsurf(&["surface", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    for k in 0..3 {
        let (header, rows) = csv_rows(&std::fs::read_to_string(out_dir.join(format!("surface_k{k}.csv"))).unwrap());
        assert_eq!(header.len(), 2 + 8);
        assert_eq!(rows.len(), 25);
    }
    assert!(!out_dir.join("surface_k0.obj").exists());
}

#[test]
fn degenerate_grid_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"n": 2, "grid": {"resolution": 0}}"#);
    let out = cpnsurf(&["surface", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn st_lambda_scan_minimum_at_plus_minus_i() {
    let out = cpnsurf(&["scan", "st-lambda", "--n", "3", "--sheet", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["sheet", "lambda_im", "distance", "hit", "pole"]);
    let finite: Vec<(f64, f64)> =
        rows.iter().filter(|r| r[4] == "false").map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap())).collect();
    let (pos, neg): (Vec<_>, Vec<_>) = finite.iter().partition(|(s, _)| *s > 0.0);
    let argmin = |v: &[(f64, f64)]| v.iter().copied().fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    assert!((argmin(&pos).0 - 1.0).abs() <= 0.05 + 1e-12);
    assert!((argmin(&neg).0 + 1.0).abs() <= 0.05 + 1e-12);
}

#[test]
fn fg_kappa_scan_root() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"n": 2, "space": "minkowski", "spectral": {"lambda": [0.5, 0.0]}}"#);
    let csv_path = dir.path().join("kappa.csv");
    let out = cpnsurf(&["scan", "fg-kappa", "--config", &cfg, "--out", csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = csv_rows(&std::fs::read_to_string(&csv_path).unwrap());
    let hits: Vec<f64> = rows.iter().filter(|r| r[5] == "true").map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(hits.len(), 1);
    assert!((hits[0] + 0.6).abs() < 1e-12);
}

#[test]
fn mixed_constraint_scan_has_both_residuals() {
    let out = cpnsurf(&["scan", "mixed-constraint", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["sheet", "lambda_im", "residual_matrix", "residual_sextic", "hit", "pole"]);
    assert_eq!(rows.len(), 121);
    let hit: Vec<&Vec<String>> = rows.iter().filter(|r| r[4] == "true").collect();
    assert!(hit.iter().any(|r| r[1].parse::<f64>().unwrap() == 1.0));
    assert_eq!(cpnsurf(&["scan", "mixed-constraint", "--n", "2"]).status.code(), Some(2));
}
