use std::path::Path;
use std::process::{Command, Output};

fn ipgm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ipgm")).args(args).output().unwrap()
}

fn write_config(dir: &Path, oracle: &str, extra: &str) -> String {
    let path = dir.join("config.json");
    let text = format!(
        r#"{{
            "version": 1,
            "problem": {{"family": "log_sum", "n": 6, "N": 10, "R": 2.0, "seed": 2}},
            "oracle": {oracle},
            "solver": {{"algorithm": "ipgm", "iterations": 100}},
            "certify": {{"pairs": 200}},
            "output": {{"dir": "{}"}}{extra}
        }}"#,
        dir.join("out").display()
    );
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const NOISY: &str = r#"{"family": "noisy_gradient", "noise_bounds": [0.2], "degrees": [0, 1]}"#;

#[test]
fn run_writes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), NOISY, "");
    let out = ipgm(&["run", "--config", &config]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out_dir = tmp.path().join("out");
    for f in ["summary.csv", "plateaus.csv", "config.json", "cells/q0_delta0.2_r0.csv", "cells/q1_delta0.2_r0.csv"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn invalid_config_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), NOISY, r#", "colour": 1"#);
    let out = ipgm(&["run", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    let out = ipgm(&["run", "--config", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn certify_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), NOISY, "");
    let out = ipgm(&["certify", "--config", &config]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("out/certification.json").exists());

    let understated = r#"{"family": "noisy_gradient", "noise_bounds": [1.0], "degrees": [1], "claim_scale": 0.05}"#;
    let config = write_config(tmp.path(), understated, "");
    let out = ipgm(&["certify", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("violating pair"));
}

#[test]
fn rates_prints_csv() {
    let out = ipgm(&["rates", "--kind", "cor1_const", "--L", "1", "--q", "1", "--delta", "0", "--delta0-gap", "1", "--ks", "0,9"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    // 2(q+1)LΔ0/(k+1) at k = 0 and k = 9.
    assert!((rows[0][1] - 4.0).abs() < 1e-12);
    assert!((rows[1][1] - 0.4).abs() < 1e-12);

    let out = ipgm(&["rates", "--kind", "cor1_const", "--L", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn worst_case_needs_directions() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), NOISY, "");
    let out = ipgm(&["worst-case", "--config", &config]);
    assert_eq!(out.status.code(), Some(1));
    let out = ipgm(&["worst-case", "--config", &config, "--directions", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
