//! End-to-end checks of the binary: exit codes, emitted files, stream
//! separation, and byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mfdfa(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfdfa"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

/// Small synthetic price file: a positive random-walk close column.
fn write_prices(dir: &Path) -> String {
    let mut body = String::from("date,close\n");
    let mut price = 100.0;
    let mut state = 88172645463325252u64;
    for day in 0..600 {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        let step = (state as f64 / u64::MAX as f64 - 0.5) * 0.04;
        price *= f64::exp(step);
        body.push_str(&format!("2001-{:02}-{:02},{price:.6}\n", day / 28 % 12 + 1, day % 28 + 1));
    }
    let path = dir.join("prices.csv");
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

const FAST: &[&str] = &[
    "--s-min", "8", "--s-max", "64", "--s-count", "8", "--boxes", "64", "--ensemble", "3",
    "--seed", "5",
];

#[test]
fn spectrum_from_csv_writes_files_and_stdout_json() {
    let dir = tempfile::tempdir().unwrap();
    let prices = write_prices(dir.path());
    let mut args = vec!["--input", prices.as_str(), "--out", "results", "spectrum"];
    args.extend_from_slice(FAST);
    let out = mfdfa(&args, dir.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let json_path = dir.path().join("results/spectrum.json");
    let csv_path = dir.path().join("results/spectrum.csv");
    assert!(json_path.exists() && csv_path.exists());

    // stdout carries the same JSON document that was written.
    let stdout = String::from_utf8(out.stdout).unwrap();
    let file_json = fs::read_to_string(&json_path).unwrap();
    assert_eq!(stdout, file_json);

    let doc: serde_json::Value = serde_json::from_str(&file_json).unwrap();
    assert_eq!(doc["experiment"], "spectrum");
    assert!(doc["input"].as_str().unwrap().contains("prices.csv"));
    assert!(doc["spectrum"]["delta_alpha"].as_f64().unwrap() >= 0.0);

    let csv = fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("q,alpha,f,alpha_std,f_std\n"));

    // Progress stays on stderr and mentions the row count.
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("600 price rows"), "stderr: {stderr}");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "--generate",
        "gaussian::1024",
        "--out",
        "a",
        "iaaft-compare",
        "--iaaft-iters",
        "5",
    ];
    args.extend_from_slice(FAST);
    let out = mfdfa(&args, dir.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let args_b: Vec<&str> = args
        .iter()
        .map(|a| if *a == "a" { "b" } else { *a })
        .collect();
    let out_b = mfdfa(&args_b, dir.path());
    assert!(out_b.status.success());

    for name in ["iaaft.json", "iaaft.csv"] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn sweep_commands_emit_their_tables() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "--generate",
        "student:gamma=3:1024",
        "--out",
        "sweep",
        "weibull-sweep",
        "--beta-grid",
        "0.5:0.9:3",
    ];
    args.extend_from_slice(FAST);
    let out = mfdfa(&args, dir.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep/weibull.csv")).unwrap();
    assert!(csv.starts_with("beta,dalpha,dalpha_std\n"));
    assert_eq!(csv.lines().count(), 4, "3 grid rows plus the header");

    let mut args = vec![
        "--generate",
        "student:gamma=3:1024",
        "--out",
        "sweep",
        "truncation-sweep",
        "--m-grid",
        "2,6",
    ];
    args.extend_from_slice(FAST);
    let out = mfdfa(&args, dir.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep/truncation.csv")).unwrap();
    assert!(csv.starts_with("M,dalpha_trun,dalpha_trun_std,dalpha_shtr,dalpha_shtr_std\n"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn decompose_reports_the_four_exponents() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "--generate",
        "gaussian::1024",
        "--out",
        "dec",
        "decompose",
        "--ensemble",
        "2",
    ];
    args.extend_from_slice(&FAST[..FAST.len() - 4]); // drop the FAST ensemble/seed, set our own
    args.extend_from_slice(&["--seed", "5"]);
    let out = mfdfa(&args, dir.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("dec/decomposition.csv")).unwrap();
    assert!(csv.starts_with("series,h,h_std\n"));
    for row in ["raw,", "magnitude,", "shuffle_magnitude,", "iaaft_magnitude,"] {
        assert!(csv.contains(row), "missing {row} in {csv}");
    }
}

#[test]
fn errors_exit_nonzero_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();

    // No input at all.
    let out = mfdfa(&["spectrum"], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("error:"), "stderr: {stderr}");

    // Missing file.
    let out = mfdfa(&["--input", "missing.csv", "spectrum"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.csv"));

    // Unparseable cell, reported with its row number.
    fs::write(dir.path().join("bad.csv"), "close\n10\nbogus\n").unwrap();
    let out = mfdfa(&["--input", "bad.csv", "spectrum"], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(stderr.contains("row 3"), "stderr: {stderr}");

    // Scale grid too large for the series.
    let prices = write_prices(dir.path());
    let out = mfdfa(
        &["--input", &prices, "--s-max", "10000", "spectrum"],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("too large"));

    // Bad generator family.
    let out = mfdfa(&["--generate", "cauchy::100", "spectrum"], dir.path());
    assert!(!out.status.success());
}
