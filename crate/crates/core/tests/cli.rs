use std::path::Path;
use std::process::{Command, Output};

use eberhard::cli::{AnalysisReport, Manifest, MANIFEST_FILE};
use eberhard::counting::ReducedCounts;

fn eberhard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eberhard"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn jstat_on_published_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.json");
    std::fs::write(&path, serde_json::to_string(&ReducedCounts::published()).unwrap()).unwrap();
    let out = eberhard(&["jstat", "--counts", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(json(&out)["j"], -126_715);
}

#[test]
fn threshold_free_r() {
    let out = eberhard(&["threshold", "--visibility", "1", "--background", "0"]);
    assert!(out.status.success());
    let eta = json(&out)["critical_efficiency"].as_f64().unwrap();
    assert!((eta - 0.667).abs() <= 0.005, "{eta}");
}

#[test]
fn feasibility_report() {
    let out = eberhard(&["feasibility", "--eta-a", "0.7246", "--eta-b", "0.7812"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["feasible_di"], false);
    assert_eq!(v["feasible_1sdi_alice_side"], true);
    assert_eq!(v["feasible_1sdi_bob_side"], true);
}

#[test]
fn optimize_reports_settings() {
    let out = eberhard(&["optimize", "--eta-a", "1", "--eta-b", "1", "--multistarts", "4"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["jn_star"].as_f64().unwrap() <= -0.2068);
    for key in ["r_star", "alpha1", "alpha2", "beta1", "beta2"] {
        assert!(v[key].is_number(), "missing {key}");
    }
}

#[test]
fn zero_rate_round_trip_gives_zero_j() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"pair_rate_hz": 0.0, "duration_s": 1.0}"#);
    let events = dir.path().join("events");
    let sim = eberhard(&["simulate", "--config", &config, "--out", events.to_str().unwrap()]);
    assert!(sim.status.success(), "{}", String::from_utf8_lossy(&sim.stderr));
    let report = dir.path().join("report.json");
    let ana = eberhard(&[
        "analyze",
        "--events",
        events.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(ana.status.success(), "{}", String::from_utf8_lossy(&ana.stderr));
    let parsed: AnalysisReport = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(parsed.j, 0);
    assert_eq!(
        parsed.counts,
        ReducedCounts {
            duration_s: parsed.counts.duration_s,
            pairs_per_setting: parsed.counts.pairs_per_setting,
            ..ReducedCounts::default()
        }
    );
    assert_eq!(parsed.significance.n_sigma, None);
    assert!(dir.path().join("report.json.blocks.csv").exists());
}

fn simulate_and_analyze(root: &Path) -> (Vec<u8>, Vec<(String, Vec<u8>)>) {
    let config = write_config(
        root,
        r#"{"pair_rate_hz": 20000.0, "duration_s": 1.0, "seed": 3, "jitter_ns": 2, "window_ns": 20}"#,
    );
    let events = root.join("events");
    assert!(
        eberhard(&["simulate", "--config", &config, "--out", events.to_str().unwrap()])
            .status
            .success()
    );
    let out = eberhard(&["analyze", "--events", events.to_str().unwrap(), "--blocks", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&events)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    (out.stdout, files)
}

#[test]
fn round_trip_is_bit_identical() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (report1, files1) = simulate_and_analyze(d1.path());
    let (report2, files2) = simulate_and_analyze(d2.path());
    assert_eq!(files1.len(), 9, "8 event files plus the manifest");
    // The manifest names no absolute paths, so it compares equal too.
    assert_eq!(files1, files2);
    assert_eq!(report1, report2);
    let report: AnalysisReport = serde_json::from_slice(&report1).unwrap();
    assert_eq!(report.window_ns, 20);
    assert_eq!(report.block_series.j_values.len(), 10);
}

#[test]
fn manifest_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"r": 0.5, "pair_rate_hz": 100.0, "duration_s": 2.0, "seed": 9}"#,
    );
    let events = dir.path().join("events");
    assert!(eberhard(&[
        "simulate",
        "--config",
        &config,
        "--out",
        events.to_str().unwrap(),
        "--seed",
        "11"
    ])
    .status
    .success());
    let manifest: Manifest =
        serde_json::from_str(&std::fs::read_to_string(events.join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest.config.r, 0.5);
    assert_eq!(manifest.config.seed, 11);
    assert_eq!(manifest.duration_ns, 2_000_000_000);
    assert_eq!(manifest.expected_pairs_per_setting, 200.0);
    assert_eq!(manifest.files.len(), 8);
}

#[test]
fn exit_codes() {
    assert_eq!(eberhard(&["--help"]).status.code(), Some(0));
    assert_eq!(eberhard(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        eberhard(&["jstat", "--counts", "/nonexistent/counts.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        eberhard(&["feasibility", "--eta-a", "1.5", "--eta-b", "0.5"])
            .status
            .code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"c_oo_a1b1": 1}"#).unwrap();
    let out = eberhard(&["jstat", "--counts", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let config = write_config(dir.path(), r#"{"not_a_key": 1}"#);
    assert_eq!(
        eberhard(&[
            "simulate",
            "--config",
            &config,
            "--out",
            dir.path().join("x").to_str().unwrap()
        ])
        .status
        .code(),
        Some(2)
    );
}
