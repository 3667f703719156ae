//! End-to-end tests of the `cwav` binary: exit codes, the worked pipeline,
//! and report determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

fn cwav() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cwav"))
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cwav-test-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn report(dir: &Path, name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn group_check_preset_and_file() {
    let dir = tmp_dir("group");
    let status = cwav()
        .args(["--out", dir.to_str().unwrap(), "group", "check", "cm-diag"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rep = report(&dir, "group-report.json");
    assert_eq!(rep["order"], 2);

    let status = cwav()
        .args([
            "--out",
            dir.to_str().unwrap(),
            "group",
            "info",
            repo_file("presets/p4.json").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rep = report(&dir, "group-report.json");
    assert_eq!(rep["order"], 4);
    assert_eq!(rep["m"], 4);
}

#[test]
fn input_errors_exit_2() {
    let dir = tmp_dir("err");
    let status = cwav()
        .args([
            "--out",
            dir.to_str().unwrap(),
            "cascade",
            "--mask",
            "/nonexistent/mask.json",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn failed_check_exits_1() {
    let dir = tmp_dir("fail");
    // a group spec violating closure
    let bad = dir.join("bad-group.json");
    std::fs::write(
        &bad,
        r#"{
          "dimension": 2,
          "basis": [[1.0, 0.0], [0.0, 1.0]],
          "point_group": [
            [[1, 0], [0, 1]],
            [[0, -1], [1, 0]]
          ]
        }"#,
    )
    .unwrap();
    let status = cwav()
        .args([
            "--out",
            dir.to_str().unwrap(),
            "group",
            "check",
            bad.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let rep = report(&dir, "group-report.json");
    assert_eq!(rep["ok"], false);
    assert!(rep["violation"].as_str().unwrap().contains("closed"));
}

#[test]
fn haar_complete_check_pipeline() {
    let dir = tmp_dir("pipeline");
    let out = dir.to_str().unwrap();

    let status = cwav()
        .args([
            "--out",
            out,
            "haar",
            "--group",
            "cm-diag",
            "--dilation",
            "2I",
            "--pieces",
            repo_file("presets/pieces-cm-triangle.json").to_str().unwrap(),
            "--level",
            "6",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rep = report(&dir, "haar-report.json");
    assert!((rep["measure"].as_f64().unwrap() - 0.5).abs() < 1e-9);

    let mask = dir.join("haar-mask.json");
    let status = cwav()
        .args(["--out", out, "complete", "--mask", mask.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rep = report(&dir, "complete-report.json");
    assert!(rep["condition_d_violation"].as_f64().unwrap() <= 1e-10);

    let bank = dir.join("bank.json");
    let status = cwav()
        .args(["--out", out, "check-d", "--bank", bank.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rep = report(&dir, "condition-d-report.json");
    assert_eq!(rep["ok"], true);
    assert!(rep["polyphase_unitarity_defect"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn jsr_reports_golden_pair_bound() {
    let dir = tmp_dir("jsr");
    let status = cwav()
        .args([
            "--out",
            dir.to_str().unwrap(),
            "jsr",
            "--set",
            repo_file("presets/jsr-golden-pair.json").to_str().unwrap(),
            "--p",
            "inf",
            "--max-length",
            "12",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rep = report(&dir, "jsr-report.json");
    assert!(rep["lower"].as_f64().unwrap() >= 1.61);
    assert!(rep["upper"].as_f64().unwrap() >= rep["lower"].as_f64().unwrap() - 1e-12);
}

#[test]
fn reports_are_deterministic_modulo_timestamp() {
    let dir_a = tmp_dir("det-a");
    let dir_b = tmp_dir("det-b");
    for dir in [&dir_a, &dir_b] {
        let status = cwav()
            .args([
                "--out",
                dir.to_str().unwrap(),
                "cascade",
                "--mask",
                repo_file("presets/cm-haar-mask.json").to_str().unwrap(),
                "--level",
                "4",
            ])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let mut a = report(&dir_a, "cascade-report.json");
    let mut b = report(&dir_b, "cascade-report.json");
    a.as_object_mut().unwrap().remove("timestamp");
    b.as_object_mut().unwrap().remove("timestamp");
    // the csv path differs by directory; normalize
    a.as_object_mut().unwrap().remove("csv");
    b.as_object_mut().unwrap().remove("csv");
    assert_eq!(a, b);
    // artifacts are byte-identical
    let csv_a = std::fs::read(dir_a.join("cascade.csv")).unwrap();
    let csv_b = std::fs::read(dir_b.join("cascade.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
}

#[test]
fn transform_round_trip_through_files() {
    let dir = tmp_dir("transform");
    let out = dir.to_str().unwrap();

    // build a bank
    cwav()
        .args([
            "--out",
            out,
            "complete",
            "--mask",
            repo_file("presets/cm-haar-mask.json").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    let bank = dir.join("bank.json");

    // deterministic input data
    let mut bytes = Vec::new();
    let cells = 8 * 8;
    for i in 0..cells * 2 * 2 {
        let v = ((i * 37 % 101) as f64 - 50.0) / 100.0;
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    let data = dir.join("data.bin");
    std::fs::write(&data, &bytes).unwrap();
    std::fs::write(
        dir.join("data.bin.json"),
        r#"{"lo": [0, 0], "hi": [7, 7], "channels": 2, "complex": true}"#,
    )
    .unwrap();

    let status = cwav()
        .args([
            "--out",
            out,
            "transform",
            "analyze",
            "--bank",
            bank.to_str().unwrap(),
            "--data",
            data.to_str().unwrap(),
            "--levels",
            "2",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rep = report(&dir, "transform-analyze-report.json");
    assert!(rep["parseval_error"].as_f64().unwrap() <= 1e-12);

    let status = cwav()
        .args([
            "--out",
            out,
            "transform",
            "synthesize",
            "--manifest",
            dir.join("transform-manifest.json").to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    // reconstructed data matches on the original box
    let side: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.join("reconstructed.bin.json")).unwrap(),
    )
    .unwrap();
    let rlo: Vec<i64> = side["lo"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_i64().unwrap())
        .collect();
    let rhi: Vec<i64> = side["hi"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_i64().unwrap())
        .collect();
    let recon = std::fs::read(dir.join("reconstructed.bin")).unwrap();
    let width = (rhi[1] - rlo[1] + 1) as usize;
    let val = |j0: i64, j1: i64, ch: usize, comp: usize| -> f64 {
        let off = ((j0 - rlo[0]) as usize * width + (j1 - rlo[1]) as usize) * 2 + ch;
        let byte = (off * 2 + comp) * 8;
        f64::from_le_bytes(recon[byte..byte + 8].try_into().unwrap())
    };
    let mut worst = 0.0f64;
    for j0 in 0..8i64 {
        for j1 in 0..8i64 {
            for ch in 0..2 {
                for comp in 0..2 {
                    let idx = (((j0 * 8 + j1) * 2 + ch as i64) * 2 + comp as i64) as usize;
                    let orig = f64::from_le_bytes(bytes[idx * 8..idx * 8 + 8].try_into().unwrap());
                    worst = worst.max((val(j0, j1, ch, comp) - orig).abs());
                }
            }
        }
    }
    assert!(worst <= 1e-10, "round trip error {worst}");
}
