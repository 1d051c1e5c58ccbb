//! End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero
//! exit if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use icb::gaussian::{build_model, genie_gap};
use icb::model::genie_objective;
use icb::regimes::{gamma_a_reference_points, in_gamma_a, smart_genie_solve};
use icb::sweep::{sweep_csv, BoundsOptions, SweepConfig};
use icb::verify::{self, PropertyResult, VerifyScale};
use icb::{lower_bound_sum_rate, max_lower_bound, upper_bound_sum_capacity, GenieParams, OptimizerConfig, PowerAllocation};

const SEED: u64 = 2024;

struct Outcome {
    passed: bool,
    detail: String,
}

fn from_properties(results: &[PropertyResult]) -> Outcome {
    Outcome {
        passed: results.iter().all(PropertyResult::passed),
        detail: results.iter().map(|r| format!("\n    {r}")).collect(),
    }
}

fn pick(results: Vec<PropertyResult>, names: &[&str]) -> Vec<PropertyResult> {
    let picked: Vec<PropertyResult> = results.into_iter().filter(|r| names.contains(&r.name)).collect();
    assert_eq!(picked.len(), names.len(), "suite is missing a property");
    picked
}

fn in_regime_matching() -> Outcome {
    let start = Instant::now();
    let cfg = OptimizerConfig::default();
    let points = gamma_a_reference_points(20);
    let (mut worst_gap, mut failures) = (0.0f64, 0);
    for ch in &points {
        let up = upper_bound_sum_capacity(ch, &cfg);
        let ok = match max_lower_bound(ch, 101) {
            Ok((lower, p0)) => {
                let gap = (up.upper_bits - lower).abs();
                worst_gap = if gap.is_nan() { f64::NAN } else { worst_gap.max(gap) };
                in_gamma_a(ch) && gap <= 1e-4 && p0 == 0.0
            }
            Err(_) => false,
        };
        failures += usize::from(!ok);
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        passed: points.len() == 20 && failures == 0 && secs < 60.0,
        detail: format!("{}/20 matched at P0 = 0, max |upper - lower| {worst_gap:.3e}, {secs:.1} s", 20 - failures),
    }
}

fn smart_genie_matching() -> Outcome {
    let points = gamma_a_reference_points(20);
    let mut worst = 0.0f64;
    let mut solved = 0;
    for ch in &points {
        let Some(s) = smart_genie_solve(ch) else { continue };
        solved += 1;
        let alloc = PowerAllocation::symmetric(ch, 0.0).expect("zero common power");
        let f = genie_objective(ch, &alloc, &GenieParams::symmetric(s.a_sq, s.b_sq)).unwrap_or(f64::NAN);
        let r = lower_bound_sum_rate(ch, 0.0).unwrap_or(f64::NAN);
        let d = (f - r).abs();
        worst = if d.is_nan() { f64::NAN } else { worst.max(d) };
    }
    Outcome {
        passed: solved == 20 && worst <= 1e-10,
        detail: format!("{solved}/20 solved, max |f - R(0)| {worst:.3e}"),
    }
}

fn smart_genie_gap() -> Outcome {
    let mut worst = 0.0f64;
    for ch in &gamma_a_reference_points(20) {
        let g = smart_genie_solve(ch)
            .and_then(|s| {
                let alloc = PowerAllocation::symmetric(ch, 0.0).ok()?;
                build_model(ch, &alloc, &GenieParams::symmetric(s.a_sq, s.b_sq)).and_then(|m| genie_gap(&m)).ok()
            })
            .unwrap_or(f64::NAN);
        worst = if g.is_nan() { f64::NAN } else { worst.max(g.abs()) };
    }
    Outcome { passed: worst <= 1e-10, detail: format!("max genie gap at smart genie {worst:.3e}") }
}

fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/sweep_golden.csv")
}

fn sweep_determinism() -> Outcome {
    let cfg = SweepConfig {
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
    };
    let runs: Vec<String> = [1, 1, 8].iter().map(|&t| sweep_csv(&cfg, t).unwrap_or_default()).collect();
    let golden = std::fs::read_to_string(golden_path()).unwrap_or_default();
    let repeat = runs[0] == runs[1];
    let threads = runs[0] == runs[2];
    let matches_golden = !golden.is_empty() && runs[0] == golden;
    Outcome {
        passed: repeat && threads && matches_golden,
        detail: format!("repeat identical {repeat}, 1 vs 8 workers identical {threads}, golden file identical {matches_golden}"),
    }
}

fn main() -> ExitCode {
    let scale = VerifyScale::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 in-regime matching", Box::new(in_regime_matching)),
        ("2 smart genie certificate", Box::new(smart_genie_matching)),
        (
            "3 gap identity",
            Box::new(move || {
                let mut out = from_properties(&pick(verify::identities(SEED, &scale), &["f = inner bound + genie gap (rel)"]));
                let gap = smart_genie_gap();
                out.passed &= gap.passed;
                out.detail.push_str(&format!("\n    {}", gap.detail));
                out
            }),
        ),
        (
            "4 f identity",
            Box::new(move || from_properties(&pick(verify::identities(SEED, &scale), &["f closed form vs log-det MI (rel)"]))),
        ),
        (
            "5 region inclusion",
            Box::new(move || {
                from_properties(&pick(
                    verify::regions(SEED, &scale),
                    &["inner regime inside decreasing regime", "inclusion polynomial identity (rel)"],
                ))
            }),
        ),
        (
            "6 monotonicity",
            Box::new(move || {
                from_properties(&pick(
                    verify::regions(SEED, &scale),
                    &["R(P0) non-increasing (max step rise)", "dR/dP0 <= 0 (max slope)"],
                ))
            }),
        ),
        ("7 optimizer soundness", Box::new(move || from_properties(&verify::optimizer(SEED, &scale)))),
        ("8 elimination", Box::new(move || from_properties(&verify::fme_suite(SEED, &scale)))),
        ("9 sweep determinism", Box::new(sweep_determinism)),
    ];

    let mut all = true;
    for (name, run) in criteria {
        let start = Instant::now();
        let out = run();
        all &= out.passed;
        println!(
            "{} {name} ({:.1} s): {}",
            if out.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
