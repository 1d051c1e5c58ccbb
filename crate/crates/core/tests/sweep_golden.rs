//! Sweep output is a pure function of the configuration: identical across
//! runs, worker counts, and against the checked-in golden file.
//! `ICB_BLESS=1` rewrites the golden file.

use std::path::PathBuf;

use icb::sweep::{run_sweep, sweep_csv, BoundsOptions, SweepConfig, CSV_HEADER};
use icb::OptimizerConfig;

fn golden_config() -> SweepConfig {
    SweepConfig {
        p_min: 1.0,
        p_max: 50.0,
        p_steps: 5,
        c_min: 0.01,
        c_max: 0.45,
        c_steps: 5,
        bounds: BoundsOptions {
            optimizer: OptimizerConfig { outer_grid_points: 33, inner_multistarts: 8, seed: 42, ..Default::default() },
            ..Default::default()
        },
        out: None,
    }
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/sweep_golden.csv")
}

#[test]
fn sweep_matches_golden_file() {
    let cfg = golden_config();
    let first = sweep_csv(&cfg, 1).unwrap();
    if std::env::var_os("ICB_BLESS").is_some() {
        std::fs::write(golden_path(), &first).unwrap();
    }
    let second = sweep_csv(&cfg, 1).unwrap();
    let wide = sweep_csv(&cfg, 8).unwrap();
    assert_eq!(first, second, "two runs differ");
    assert_eq!(first, wide, "1 vs 8 workers differ");
    let golden = std::fs::read_to_string(golden_path()).unwrap();
    assert_eq!(first, golden);
}

#[test]
fn golden_rows_respect_regime_claims() {
    let csv = std::fs::read_to_string(golden_path()).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let mut rows = 0;
    for line in lines {
        rows += 1;
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 12, "{line}");
        let lower: f64 = f[6].parse().unwrap();
        let upper: f64 = if f[7] == "inf" { f64::INFINITY } else { f[7].parse().unwrap() };
        let gap: f64 = if f[8] == "inf" { f64::INFINITY } else { f[8].parse().unwrap() };
        if f[2] == "true" {
            assert_eq!(f[3], "true", "matching regime outside decreasing regime: {line}");
            assert!(gap <= 1e-4, "{line}");
            assert_eq!(f[5], "0", "{line}");
        }
        if f[11] == "Matched" {
            assert!(upper >= lower - 1e-9 && (upper - lower).abs() <= 1e-4, "{line}");
        }
        if f[11] == "NoCertificate" {
            assert_eq!(f[7], "inf");
        }
    }
    assert_eq!(rows, 25);
}

#[test]
fn run_sweep_writes_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let cfg = SweepConfig {
        p_steps: 2,
        c_steps: 2,
        out: Some(out.clone()),
        ..golden_config()
    };
    let text = run_sweep(&cfg, 2).unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), text);
    assert_eq!(text.lines().count(), 5);

    let bad = SweepConfig { out: Some(dir.path().join("missing/grid.csv")), ..cfg };
    assert!(matches!(run_sweep(&bad, 1), Err(icb::Error::Io(_))));
}
