//! End-to-end tests of the command-line binary: artifact layout, byte
//! determinism of repeated runs, and exit codes.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_benford-copula"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const FAST_CONFIG: &str = r#"{
    "copula": {"family": "clayton", "alpha": 1.5, "n": 2},
    "marginals": [{"kind": "uniform01"}, {"kind": "normal", "mu": 0.0, "sigma": 1.0}],
    "grid": 8,
    "seed": 11
}"#;

#[test]
fn analyze_writes_artifacts_and_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", FAST_CONFIG);
    for out in ["run1", "run2"] {
        let status = bin()
            .args(["analyze", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path().join(out))
            .status()
            .unwrap();
        assert!(status.success());
    }
    let grid1 = fs::read(dir.path().join("run1/pdf_grid.csv")).unwrap();
    let grid2 = fs::read(dir.path().join("run2/pdf_grid.csv")).unwrap();
    assert_eq!(grid1, grid2, "pdf_grid.csv must be byte-identical");
    let rep1 = fs::read(dir.path().join("run1/report.json")).unwrap();
    let rep2 = fs::read(dir.path().join("run2/report.json")).unwrap();
    assert_eq!(rep1, rep2, "report.json must be byte-identical");

    let parsed: serde_json::Value = serde_json::from_slice(&rep1).unwrap();
    assert_eq!(parsed["schema_version"], 1);
    assert!(parsed["report"]["l1_distance"].as_f64().unwrap() >= 0.0);
    assert_eq!(parsed["estimate"]["values"].as_array().unwrap().len(), 8);
    let header = String::from_utf8(grid1).unwrap();
    assert!(header.starts_with("s,pdf,quad_err\n"));
}

#[test]
fn seed_override_changes_report_but_not_grid() {
    // the grid is deterministic quadrature; only sampled quantities
    // (copula-norm QMC shifts) depend on the seed
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", FAST_CONFIG);
    for (out, seed) in [("a", "11"), ("b", "987654")] {
        let status = bin()
            .args(["analyze", "--config"])
            .arg(&cfg)
            .args(["--seed", seed, "--out"])
            .arg(dir.path().join(out))
            .status()
            .unwrap();
        assert!(status.success());
    }
    let grid_a = fs::read(dir.path().join("a/pdf_grid.csv")).unwrap();
    let grid_b = fs::read(dir.path().join("b/pdf_grid.csv")).unwrap();
    assert_eq!(grid_a, grid_b);
    let rep_a: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("a/report.json")).unwrap()).unwrap();
    let rep_b: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("b/report.json")).unwrap()).unwrap();
    assert_eq!(rep_a["config"]["seed"], 11);
    assert_eq!(rep_b["config"]["seed"], 987654);
}

#[test]
fn digit_table_has_all_digits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", FAST_CONFIG);
    let status = bin()
        .args(["digit-table", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(dir.path().join("digits.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "d,benford_prob,model_prob,empirical_prob,abs_diff");
    assert_eq!(lines.len(), 10, "header plus digits 1..9");
    for (d, line) in lines[1..].iter().enumerate() {
        assert!(line.starts_with(&format!("{},", d + 1)));
        assert!(!line.contains("nan"), "clayton alpha=1.5 has a sampler");
    }
}

#[test]
fn sweep_alpha_skips_invalid_alphas() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{
            "copula": {"family": "amh", "alpha": 0.0, "n": 2},
            "pairing": "A",
            "mode": "sweep_alpha",
            "alpha_list": [-0.5, 0.5, 7.0],
            "grid": 8
        }"#,
    );
    let out = bin()
        .args(["sweep-alpha", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    // alpha = 7 is outside the AMH range: skipped with a warning, not fatal
    assert_eq!(csv.lines().count(), 3, "header plus two valid alphas");
    assert!(String::from_utf8_lossy(&out.stderr).contains("skipping alpha=7"));
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_json = write_config(dir.path(), "bad.json", "{ not json");
    let unknown_field = write_config(
        dir.path(),
        "unk.json",
        r#"{"copula": {"family": "clayton", "alpha": 1.0, "n": 2}, "pairing": "A", "grd": 8}"#,
    );
    let bad_pairing = write_config(
        dir.path(),
        "pair.json",
        r#"{"copula": {"family": "clayton", "alpha": 1.0, "n": 2}, "pairing": "Z"}"#,
    );
    for cfg in [&bad_json, &unknown_field, &bad_pairing] {
        let status = bin()
            .args(["analyze", "--config"])
            .arg(cfg)
            .arg("--out")
            .arg(dir.path())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(2), "config {cfg:?}");
    }
    // missing file is also a config problem
    let status = bin()
        .args(["analyze", "--config"])
        .arg(dir.path().join("missing.json"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn validate_writes_passing_suite() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["validate", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("validation.json")).unwrap()).unwrap();
    assert_eq!(v["all_pass"], true);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 7);
    for c in checks {
        assert_eq!(c["pass"], true, "check {} failed: {}", c["name"], c["detail"]);
    }
}
