use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn pcboot(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcboot"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&o.stdout));
    })
}

fn write_series(dir: &Path, name: &str, values: &[f64]) -> PathBuf {
    let mut text = String::from("x\n");
    for v in values {
        text.push_str(&format!("{v}\n"));
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/modulated_cosine.csv")
}

#[test]
fn simulate_par1_writes_300_rows() {
    let dir = TempDir::new().unwrap();
    let o = pcboot(dir.path(), &["simulate", "--model", "par1", "--n", "300", "--seed", "7", "--out", "p.csv"]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("x"));
    assert_eq!(text.lines().count(), 301);
    assert!(dir.path().join("p.csv.manifest.json").exists());
}

#[test]
fn simulate_iid_with_zero_sd_gives_zeros() {
    let dir = TempDir::new().unwrap();
    let o = pcboot(
        dir.path(),
        &["simulate", "--model", "iid", "--n", "10", "--sd", "0", "--seed", "1", "--out", "z.csv"],
    );
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(dir.path().join("z.csv")).unwrap();
    let vals: Vec<f64> = text.lines().skip(1).map(|l| l.parse().unwrap()).collect();
    assert_eq!(vals, vec![0.0; 10]);
}

#[test]
fn simulate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    for name in ["a.csv", "b.csv"] {
        let o = pcboot(
            dir.path(),
            &["simulate", "--model", "modulated", "--n", "500", "--seed", "3", "--out", name],
        );
        assert_eq!(code(&o), 0);
    }
    assert_eq!(
        fs::read(dir.path().join("a.csv")).unwrap(),
        fs::read(dir.path().join("b.csv")).unwrap()
    );
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let o = pcboot(dir.path(), &["simulate", "--model", "par1", "--n", "30", "--out", "x.csv"]);
    assert_eq!(code(&o), 1, "missing --seed");
    let o = pcboot(dir.path(), &["simulate", "--model", "nope", "--n", "30", "--seed", "1", "--out", "x.csv"]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&pcboot(dir.path(), &["--help"])), 0);
    assert_eq!(code(&pcboot(dir.path(), &["--version"])), 0);
}

#[test]
fn data_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let o = pcboot(dir.path(), &["estimate", "--input", "missing.csv", "--lambda", "0", "--tau", "0"]);
    assert_eq!(code(&o), 2);

    fs::write(dir.path().join("bad.csv"), "y\n1\n2\n").unwrap();
    let o = pcboot(dir.path(), &["estimate", "--input", "bad.csv", "--lambda", "0", "--tau", "0"]);
    assert_eq!(code(&o), 2);

    write_series(dir.path(), "short.csv", &[1.0, 2.0, 3.0]);
    let o = pcboot(
        dir.path(),
        &["scan", "--input", "short.csv", "--tau", "1", "--block", "30", "--seed", "0"],
    );
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("block exceeds effective sample"));
}

#[test]
fn estimate_on_constant_input() {
    let dir = TempDir::new().unwrap();
    write_series(dir.path(), "one.csv", &[1.0; 300]);
    let v = json(&pcboot(dir.path(), &["estimate", "--input", "one.csv", "--lambda", "0", "--tau", "0"]));
    assert_eq!(v["re"], 1.0);
    assert_eq!(v["im"], 0.0);

    let lambda = format!("{}", TAU / 3.0);
    let v = json(&pcboot(dir.path(), &["estimate", "--input", "one.csv", "--lambda", &lambda, "--tau", "0"]));
    assert!(v["re"].as_f64().unwrap().abs() < 1e-12);
    assert!(v["im"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn estimate_on_modulated_fixture() {
    let dir = TempDir::new().unwrap();
    let input = fixture();
    let v = json(&pcboot(
        dir.path(),
        &["estimate", "--input", input.to_str().unwrap(), "--lambda", "0", "--tau", "0"],
    ));
    let re = v["re"].as_f64().unwrap();
    assert!((re - 0.5).abs() <= 0.05, "{re}");
    assert_eq!(v["n"], 10_000);
}

#[test]
fn scan_of_constant_input_is_empty() {
    let dir = TempDir::new().unwrap();
    write_series(dir.path(), "c.csv", &[2.0; 300]);
    let o = pcboot(
        dir.path(),
        &["scan", "--input", "c.csv", "--tau", "1", "--block", "30", "--seed", "5", "--tsv", "c.tsv"],
    );
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["significant_lambdas"], serde_json::json!([]));
    assert_eq!(v["inferred_period"], Value::Null);
    let tsv = fs::read_to_string(dir.path().join("c.tsv")).unwrap();
    assert_eq!(tsv.lines().count(), 152);
}

#[test]
fn scan_of_long_par1_reports_period_three() {
    let dir = TempDir::new().unwrap();
    let o = pcboot(dir.path(), &["simulate", "--model", "par1", "--n", "3000", "--seed", "11", "--out", "p.csv"]);
    assert_eq!(code(&o), 0);
    let v = json(&pcboot(
        dir.path(),
        &["scan", "--input", "p.csv", "--tau", "1", "--block", "100", "--seed", "2"],
    ));
    assert_eq!(v["inferred_period"], 3, "{v}");
}

#[test]
fn scan_of_iid_input_rarely_finds_a_period() {
    let dir = TempDir::new().unwrap();
    let mut nulls = 0;
    for s in 1..=10 {
        let seed = s.to_string();
        let name = format!("iid{s}.csv");
        let o = pcboot(dir.path(), &["simulate", "--model", "iid", "--n", "300", "--seed", &seed, "--out", &name]);
        assert_eq!(code(&o), 0);
        let v = json(&pcboot(
            dir.path(),
            &["scan", "--input", &name, "--tau", "1", "--block", "30", "--seed", &seed],
        ));
        nulls += usize::from(v["inferred_period"].is_null());
    }
    assert!(nulls >= 8, "{nulls}/10");
}

#[test]
fn diagnose_blockvar_iid() {
    let dir = TempDir::new().unwrap();
    let o = pcboot(
        dir.path(),
        &["diagnose", "--mode", "blockvar", "--model", "iid", "--b", "50", "--seed", "0"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert!(v["report"]["rows"][0]["sup_dev"].as_f64().unwrap() <= 0.15);
}

#[test]
fn diagnose_consistency_zeros() {
    let dir = TempDir::new().unwrap();
    let o = pcboot(
        dir.path(),
        &["diagnose", "--mode", "consistency", "--model", "zeros", "--n", "100,400", "--seed", "0"],
    );
    assert_eq!(code(&o), 0);
    let v = json(&o);
    for row in v["report"]["rows"].as_array().unwrap() {
        assert_eq!(row["ks_distance"], 0.0);
    }
}

#[test]
fn diagnose_consistency_par1() {
    let dir = TempDir::new().unwrap();
    let o = pcboot(
        dir.path(),
        &["diagnose", "--mode", "consistency", "--model", "par1", "--n", "300,1200,4800", "--seed", "0"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn failed_diagnostic_exits_three() {
    let dir = TempDir::new().unwrap();
    let o = pcboot(
        dir.path(),
        &[
            "diagnose", "--mode", "blockvar", "--model", "iid", "--n", "200", "--b", "20", "--seed", "0",
            "--max-final", "0",
        ],
    );
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn manifest_replay_reproduces_outputs() {
    let dir = TempDir::new().unwrap();
    pcboot(dir.path(), &["simulate", "--model", "par1", "--n", "300", "--seed", "4", "--out", "p.csv"]);
    let o = pcboot(
        dir.path(),
        &[
            "scan", "--input", "p.csv", "--tau", "1", "--block", "30", "--seed", "9", "--tsv", "p.tsv", "--out",
            "p.json",
        ],
    );
    assert_eq!(code(&o), 0);
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("p.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "scan");
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);

    for m in ["p.csv.manifest.json", "p.json.manifest.json"] {
        let o = pcboot(dir.path(), &["replay", "--manifest", m]);
        assert_eq!(code(&o), 0, "{m}: {}", String::from_utf8_lossy(&o.stderr));
    }

    // Tampered output: replay regenerates it, so the hashes match again.
    fs::write(dir.path().join("p.tsv"), "junk").unwrap();
    assert_eq!(code(&pcboot(dir.path(), &["replay", "--manifest", "p.json.manifest.json"])), 0);

    // Changed input: refuse to replay.
    write_series(dir.path(), "p.csv", &[1.0; 300]);
    assert_eq!(code(&pcboot(dir.path(), &["replay", "--manifest", "p.json.manifest.json"])), 2);
}

#[test]
fn replay_detects_a_different_recorded_hash() {
    let dir = TempDir::new().unwrap();
    pcboot(dir.path(), &["simulate", "--model", "iid", "--n", "50", "--seed", "4", "--out", "s.csv"]);
    let path = dir.path().join("s.csv.manifest.json");
    let mut manifest: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    manifest["outputs"][0]["sha256"] = Value::from("0".repeat(64));
    fs::write(&path, manifest.to_string()).unwrap();
    assert_eq!(code(&pcboot(dir.path(), &["replay", "--manifest", "s.csv.manifest.json"])), 3);
}
