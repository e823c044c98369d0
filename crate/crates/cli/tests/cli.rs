//! End-to-end tests of the focuslab binary: flags, config files, exit
//! codes, and manifest/output contracts.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use focuslab::config::ScenarioConfig;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_focuslab"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("focuslab-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn read_manifest(dir: &Path) -> serde_json::Value {
    let bytes = std::fs::read(dir.join("manifest.json")).expect("manifest exists");
    serde_json::from_slice(&bytes).expect("manifest parses")
}

#[test]
fn simulate_automaton_tiny_grid() {
    let out = temp_dir("sim-auto");
    let status = binary()
        .args([
            "simulate", "--model", "automaton", "--N", "1", "--delta", "0.05",
            "--taumax", "0", "--out", out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("grid.csv")).unwrap();
    let mut lines = csv.lines();
    lines.next(); // comment
    lines.next(); // header
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    // single row: three cells of 1/3 around the center, zero elsewhere
    assert_eq!(row[0], "0");
    let values: Vec<f64> = row[1..].iter().map(|v| v.parse().unwrap()).collect();
    let third = 1.0 / 3.0;
    assert_eq!(values.len(), 3);
    for v in values {
        assert!((v - third).abs() < 1e-15);
    }
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn exit_code_1_on_config_error() {
    let out = temp_dir("bad-config");
    let status = binary()
        .args(["simulate", "--model", "nonsense", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    // no outputs, no manifest
    assert!(!out.join("manifest.json").exists());

    let status = binary().args(["frobnicate"]).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn exit_code_1_on_unknown_config_key_with_line() {
    let out = temp_dir("badkey");
    std::fs::create_dir_all(&out).unwrap();
    let conf = out.join("run.conf");
    std::fs::write(&conf, "n = 3\nwidget = 9\n").unwrap();
    let output = binary()
        .args(["simulate", "--config", conf.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("run.conf:2"), "line-precise message, got: {stderr}");
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn exit_code_3_on_unwritable_output() {
    let status = binary()
        .args([
            "simulate", "--model", "automaton", "--N", "1", "--taumax", "1",
            "--out", "/proc/focuslab-cannot-write-here",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn config_file_plus_flag_precedence() {
    let out = temp_dir("precedence");
    std::fs::create_dir_all(&out).unwrap();
    let conf = out.join("run.conf");
    std::fs::write(
        &conf,
        format!(
            "model = tightbinding\nn = 3\n[time]\nsamples = 40\n[output]\ndir = {}\n",
            out.join("data").display()
        ),
    )
    .unwrap();
    // flag overrides the file's packet size
    let status = binary()
        .args(["simulate", "--config", conf.to_str().unwrap(), "--N", "2"])
        .status()
        .unwrap();
    assert!(status.success());
    let manifest = read_manifest(&out.join("data"));
    assert_eq!(manifest["config"]["scenario.n"], "2");
    assert_eq!(manifest["config"]["time.samples"], "40");
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn manifest_checksums_match_files_and_config_round_trips() {
    let out = temp_dir("manifest");
    let status = binary()
        .args([
            "simulate", "--model", "tightbinding", "--N", "2", "--samples", "30",
            "--out", out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let manifest = read_manifest(&out);
    assert_eq!(manifest["tool"], "focuslab");
    for entry in manifest["outputs"].as_array().unwrap() {
        let name = entry["file"].as_str().unwrap();
        let bytes = std::fs::read(out.join(name)).unwrap();
        assert_eq!(
            entry["sha256"].as_str().unwrap(),
            focuslab::manifest::hex_digest(&bytes),
            "checksum of {name}"
        );
        assert_eq!(entry["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
    // the config echo re-parses to an equivalent configuration
    let echo: BTreeMap<String, String> = manifest["config"]
        .as_object()
        .unwrap()
        .iter()
        .map(|(k, v)| (k.clone(), v.as_str().unwrap().to_string()))
        .collect();
    let rebuilt = ScenarioConfig::from_echo_map(&echo).unwrap();
    assert_eq!(rebuilt.n_half, 2);
    assert_eq!(rebuilt.samples, 30);
    assert_eq!(rebuilt.to_echo_map(), echo);
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn json_format_mirrors_csv_structure() {
    let out = temp_dir("json");
    let status = binary()
        .args([
            "simulate", "--model", "continuum", "--L", "1", "--samples", "20",
            "--xsamples", "41", "--format", "json", "--out", out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.join("grid.json")).unwrap()).unwrap();
    assert_eq!(v["row_label"], "time");
    assert_eq!(v["columns"].as_array().unwrap().len(), 41);
    assert_eq!(v["rows"].as_array().unwrap().len(), 20);
    assert_eq!(v["row_values"].as_array().unwrap().len(), 20);
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn continuum_central_column_peaks_near_focus() {
    let out = temp_dir("cont");
    let status = binary()
        .args([
            "simulate", "--model", "continuum", "--L", "1", "--samples", "200",
            "--xsamples", "11", "--out", out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("grid.csv")).unwrap();
    let mut header: Vec<String> = Vec::new();
    let mut best = (0.0f64, f64::MIN);
    for (i, line) in csv.lines().enumerate() {
        if line.starts_with('#') {
            continue;
        }
        if header.is_empty() {
            header = line.split(',').map(str::to_string).collect();
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let t: f64 = cells[0].parse().unwrap();
        // central column: x_0
        let idx = header.iter().position(|h| h == "x_0").unwrap_or_else(|| {
            panic!("no central column in {header:?} (line {i})")
        });
        let v: f64 = cells[idx].parse().unwrap();
        if v > best.1 {
            best = (t, v);
        }
    }
    assert!(
        (best.0 - 0.026).abs() < 0.004,
        "central-column argmax at t={} (value {})",
        best.0,
        best.1
    );
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn scan_range_too_small_is_inconclusive() {
    let out = temp_dir("scan-small");
    let output = binary()
        .args([
            "scan", "--model", "tightbinding", "--nmin", "1", "--nmax", "2",
            "--samples", "60", "--out", out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("inconclusive"), "{stdout}");
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn wigner_time_zero_matrix_matches_closed_form() {
    let out = temp_dir("wigner0");
    let status = binary()
        .args([
            "wigner", "--N", "7", "--knodes", "31", "--wigner-times", "0",
            "--out", out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("wigner_t0.csv")).unwrap();
    let mut header: Vec<String> = Vec::new();
    for line in csv.lines() {
        if line.starts_with('#') {
            continue;
        }
        if header.is_empty() {
            header = line.split(',').map(str::to_string).collect();
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        let n: i64 = cells[0].parse().unwrap();
        for (j, cell) in cells[1..].iter().enumerate() {
            let k: f64 = header[j + 1].trim_start_matches("k_").parse().unwrap();
            let v: f64 = cell.parse().unwrap();
            let want = focuslab_core::wigner::initial_square_wigner(7, n, k);
            assert!((v - want).abs() < 1e-12, "n={n} k={k}");
        }
    }
    let _ = std::fs::remove_dir_all(&out);
}

#[test]
fn env_var_thread_fallback_is_accepted() {
    let out = temp_dir("envthreads");
    let status = binary()
        .args([
            "simulate", "--model", "tightbinding", "--N", "1", "--samples", "10",
            "--out", out.to_str().unwrap(),
        ])
        .env("FOCUSLAB_THREADS", "2")
        .status()
        .unwrap();
    assert!(status.success());
    let _ = std::fs::remove_dir_all(&out);
}
