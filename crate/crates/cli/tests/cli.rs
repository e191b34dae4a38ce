use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use clap::Parser;
use qdexciton::Params;
use qdexciton_cli::{parse_config, Cli, Command as Sub};
use serde_json::Value;
use tempfile::TempDir;

fn qdexciton(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdexciton"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn peak_positions(report: &Value) -> Vec<f64> {
    report["peaks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["position_mev"].as_f64().unwrap())
        .collect()
}

#[test]
fn fig1_flags_match_scenario() {
    let cli = Cli::try_parse_from([
        "qdexciton",
        "spectrum",
        "--omega",
        "1562",
        "--g",
        "20",
        "--n-molecules",
        "100",
        "--gamma",
        "0.1",
        "--excitation",
        "2",
    ])
    .unwrap();
    let Sub::Spectrum(args) = cli.command else {
        panic!("spectrum subcommand");
    };
    let config = parse_config(*args).unwrap();
    assert_eq!(config.params, Params::fig1());
    assert_eq!(config.excitation, 2);
}

#[test]
fn fig1_has_six_peaks() {
    let dir = TempDir::new().unwrap();
    let out = qdexciton(dir.path(), &["spectrum", "--scenario", "fig1"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(dir.path(), "spectrum.report.json");
    assert_eq!(peak_positions(&r).len(), 6);
    for key in ["config", "eigenvalues", "lines", "peaks"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn fig1_single_excitation_doublet() {
    let dir = TempDir::new().unwrap();
    let out = qdexciton(
        dir.path(),
        &["spectrum", "--scenario", "fig1", "--excitation", "1"],
    );
    assert!(out.status.success());
    let peaks = peak_positions(&report(dir.path(), "spectrum.report.json"));
    assert_eq!(peaks.len(), 2);
    assert!((peaks[0] - 1542.0).abs() <= 0.05);
    assert!((peaks[1] - 1582.0).abs() <= 0.05);
}

#[test]
fn fig2_has_two_peaks() {
    let dir = TempDir::new().unwrap();
    let out = qdexciton(dir.path(), &["spectrum", "--scenario", "fig2"]);
    assert!(out.status.success());
    assert_eq!(
        peak_positions(&report(dir.path(), "spectrum.report.json")).len(),
        2
    );
}

#[test]
fn too_few_molecules_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = qdexciton(dir.path(), &["spectrum", "--n-molecules", "2"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("N must be ≥ 3"), "{err}");
    assert!(err.contains("n_molecules"), "{err}");
}

#[test]
fn csv_header_and_line_endings() {
    let dir = TempDir::new().unwrap();
    assert!(qdexciton(dir.path(), &["spectrum", "--excitation", "1"])
        .status
        .success());
    let text = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(text.starts_with("omega_mev,s_omega\n"));
    assert!(!text.contains('\r'));
    let row = text.lines().nth(1).unwrap();
    let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(cols.len(), 2);
    assert!(cols[1] >= 0.0);
}

#[test]
fn json_table_is_an_array() {
    let dir = TempDir::new().unwrap();
    let out = qdexciton(
        dir.path(),
        &[
            "spectrum",
            "--excitation",
            "1",
            "--format",
            "json",
            "--output",
            "s.json",
        ],
    );
    assert!(out.status.success());
    let v = report(dir.path(), "s.json");
    let rows = v.as_array().unwrap();
    assert!(rows.len() > 1000);
    assert!(rows[0]["omega_mev"].is_f64() && rows[0]["s_omega"].is_f64());
    assert!(dir.path().join("s.report.json").exists());
}

#[test]
fn runs_are_bit_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        assert!(qdexciton(dir.path(), &["spectrum", "--scenario", "fig1"])
            .status
            .success());
    }
    for name in ["spectrum.csv", "spectrum.report.json"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn report_config_round_trips() {
    let dir = TempDir::new().unwrap();
    let out = qdexciton(
        dir.path(),
        &[
            "spectrum",
            "--scenario",
            "fig2",
            "--kappa",
            "0.25",
            "--method",
            "exact_numeric",
            "--initial-state",
            "0.6,0.8,0",
            "--min-separation",
            "0.5",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let first = fs::read(dir.path().join("spectrum.report.json")).unwrap();
    let r: Value = serde_json::from_slice(&first).unwrap();
    fs::write(dir.path().join("resolved.json"), r["config"].to_string()).unwrap();

    let out = qdexciton(dir.path(), &["spectrum", "--config", "resolved.json"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        fs::read(dir.path().join("spectrum.report.json")).unwrap(),
        first
    );
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("run.conf"),
        "# large film\nn_molecules = 10000\nexcitation = 1\n",
    )
    .unwrap();
    let out = qdexciton(
        dir.path(),
        &["spectrum", "--config", "run.conf", "--n-molecules", "100"],
    );
    assert!(out.status.success());
    let r = report(dir.path(), "spectrum.report.json");
    assert_eq!(r["config"]["n_molecules"], 100);
    assert_eq!(r["config"]["excitation"], 1);
}

#[test]
fn unknown_file_key_is_named() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("run.conf"), "omega = 1562\ncoupling = 20\n").unwrap();
    let out = qdexciton(dir.path(), &["spectrum", "--config", "run.conf"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("`coupling`"));
}

#[test]
fn coarse_grid_is_rejected() {
    let dir = TempDir::new().unwrap();
    let out = qdexciton(dir.path(), &["spectrum", "--grid-step", "0.5"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid_step"));
}

#[test]
fn unnormalized_amplitudes_are_rejected() {
    let dir = TempDir::new().unwrap();
    let out = qdexciton(
        dir.path(),
        &["spectrum", "--excitation", "1", "--initial-state", "1,1"],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("initial_state"));
}

#[test]
fn validate_fast_passes_quickly() {
    let dir = TempDir::new().unwrap();
    let started = Instant::now();
    let out = qdexciton(dir.path(), &["validate", "--level", "fast"]);
    assert!(started.elapsed().as_secs_f64() < 10.0);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("tampered"));
    assert!(table.contains("0 failed"));
}

#[test]
fn validate_full_sweeps_n() {
    let dir = TempDir::new().unwrap();
    let out = qdexciton(dir.path(), &["validate", "--level", "full"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("N 200 -> 1000"));
}
