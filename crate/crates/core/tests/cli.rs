//! End-to-end runs of the `doew` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn doew(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doew"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

/// Parsed CSV: header plus rows of floats.
fn csv(out: &Output) -> (Vec<String>, Vec<Vec<f64>>) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

const RHO1: &str = "1=0.4,3=0.2,5=0.2,7=0.2";

#[test]
fn state_phi1_has_four_equal_amplitudes() {
    let v = json(&doew(&["state", "--phi", "1"]));
    assert_eq!(v["tool"], "doew");
    assert_eq!(v["seed"], 24301);
    let amps = v["result"]["amplitudes"].as_array().unwrap();
    assert_eq!(amps.len(), 16);
    for (k, a) in amps.iter().enumerate() {
        let re = a[0].as_f64().unwrap();
        let want = if [0, 5, 10, 15].contains(&k) { 0.5 } else { 0.0 };
        assert!(
            (re - want).abs() < 1e-15 && a[1].as_f64().unwrap() == 0.0,
            "index {k}"
        );
    }
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(doew(&["state", "--phi", "17"]).status.code(), Some(2));
    assert_eq!(doew(&["witness", "--q", "1=0.4,3=0.2"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("w.json");
    std::fs::write(&bad, "{\"q\": {\"1\": 0.4,").unwrap();
    let out = doew(&["witness", "--weights", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn domain_errors_exit_with_one() {
    let out = doew(&[
        "measure",
        "--theta1",
        "3.141592653589793",
        "--theta2",
        "3.141592653589793",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn witness_verdicts() {
    let ent = json(&doew(&["witness", "--q", RHO1, "--parity", "odd"]));
    assert_eq!(ent["result"]["verdict"], "entangled");
    assert!((ent["result"]["min_value"].as_f64().unwrap() + 0.6).abs() < 1e-12);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edge.json");
    std::fs::write(
        &path,
        r#"{"q": {"1": 0.25, "7": 0.25, "3": 0.125, "5": 0.125, "9": 0.125, "13": 0.125}, "parity": "odd"}"#,
    )
    .unwrap();
    let sep = json(&doew(&["witness", "--weights", path.to_str().unwrap()]));
    assert_ne!(sep["result"]["verdict"], "entangled");
    assert!(sep["result"]["min_value"].as_f64().unwrap() >= -1e-10);
}

#[test]
fn theta2_sweep_weakens_detection() {
    let (h, rows) = csv(&doew(&[
        "sweep", "--param", "theta2", "--start", "0", "--stop", "3", "--steps", "13",
    ]));
    assert_eq!(h[0], "sweep_theta2");
    let w = column(&h, "witness_value_closed_form");
    assert!((rows[0][w] + 3.0).abs() < 1e-12);
    for pair in rows.windows(2) {
        assert!(pair[1][w] > pair[0][w]);
    }
    assert!(rows.last().unwrap()[w] < -1.0);
}

#[test]
fn diagonal_sweep_is_frame_independent() {
    let (h, rows) = csv(&doew(&[
        "sweep",
        "--param",
        "theta1",
        "--diagonal",
        "--start",
        "0",
        "--stop",
        "2.5",
        "--steps",
        "9",
    ]));
    let (w, s) = (column(&h, "witness_value_numeric"), column(&h, "entropy_bits"));
    for r in &rows {
        assert!((r[w] + 3.0).abs() < 1e-10);
        assert!((r[s] - 2.0).abs() < 1e-10);
    }
}

#[test]
fn q1_sweep_crosses_zero_at_a_quarter() {
    let (h, rows) = csv(&doew(&[
        "sweep", "--param", "q1", "--start", "0", "--stop", "0.5", "--steps", "5",
    ]));
    let (x, w, opt) = (
        column(&h, "sweep_q1"),
        column(&h, "witness_value_numeric"),
        column(&h, "optimal_value_numeric"),
    );
    for r in &rows {
        assert!((r[w] - (1.0 - 4.0 * r[x])).abs() < 1e-12, "{r:?}");
        if r[x] <= 0.25 {
            assert!(r[opt] >= -1e-10, "{r:?}");
        } else {
            assert!(r[opt] < -1e-3, "{r:?}");
        }
    }
}

#[test]
fn closed_and_numeric_columns_agree() {
    let (h, rows) = csv(&doew(&[
        "sweep",
        "--param",
        "theta1",
        "--start",
        "0",
        "--stop",
        "3",
        "--steps",
        "16",
        "--theta2",
        "0.4",
        "--q",
        "1=0.5,3=0.2,9=0.2,15=0.1",
        "--parity",
        "odd",
    ]));
    for (a, b) in [
        ("witness_value_closed_form", "witness_value_numeric"),
        ("optimal_value_closed_form", "optimal_value_numeric"),
    ] {
        let (i, j) = (column(&h, a), column(&h, b));
        for r in &rows {
            assert!((r[i] - r[j]).abs() < 1e-9, "{a} vs {b}: {r:?}");
        }
    }
}

#[test]
fn alpha_sweep_is_deterministic_and_writes_files() {
    let args = [
        "sweep", "--param", "alpha", "--start", "0", "--stop", "2", "--steps", "7",
    ];
    let a = doew(&args);
    let b = doew(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let summary = json(&doew(&with_out));
    assert_eq!(summary["command"], "sweep");
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"phi": 2, "theta": 0.3}"#).unwrap();
    let v = json(&doew(&["state", "--config", cfg.to_str().unwrap(), "--phi", "1"]));
    assert_eq!(v["input"]["phi"], 1);
    assert!((v["input"]["theta"].as_f64().unwrap() - 0.3).abs() < 1e-15);
}
