//! Property suites behind the `verify` command. Each suite draws its own
//! random instances from a seed and reports counts and worst residuals.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fme::{self, max_sum_rate, oracle, SumRate};
use crate::gaussian::{build_model, genie_gap, genie_objective_via_mi, markov_check, mc_entropy_check, Signal};
use crate::genie::{brute_force_oracle, inner_min_g, upper_bound_with_hints, OptimizerConfig};
use crate::model::{
    genie_objective, lower_bound_sum_rate, max_lower_bound, ChannelParams, GenieParams, PowerAllocation,
};
use crate::regimes::{
    gamma_a_reference_points, gamma_b_boundary_power, in_gamma_b, inclusion_polynomial, smart_genie_solve,
    sum_rate_derivative, verify_region_inclusion,
};
use crate::rng::keyed_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Regions,
    Optimizer,
    Fme,
    All,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "identities" => Suite::Identities,
            "regions" => Suite::Regions,
            "optimizer" => Suite::Optimizer,
            "fme" => Suite::Fme,
            "all" => Suite::All,
            other => return Err(Error::Config(format!("unknown suite `{other}` (identities, regions, optimizer, fme, all)"))),
        })
    }
}

/// Outcome of one property over many instances.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub threshold: f64,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }

    fn from_residuals(name: &'static str, threshold: f64, residuals: impl IntoIterator<Item = f64>) -> Self {
        let (mut checked, mut failures, mut worst) = (0, 0, f64::NEG_INFINITY);
        for r in residuals {
            checked += 1;
            // NaN counts as a failure
            if !(r <= threshold) {
                failures += 1;
            }
            worst = nan_max(worst, r);
        }
        Self { name, checked, failures, max_residual: worst, threshold }
    }
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<34} {}/{} max residual {:.3e} (threshold {:.0e})",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.checked - self.failures,
            self.checked,
            self.max_residual,
            self.threshold
        )
    }
}

/// Instance counts; [`VerifyScale::default`] is the full-size run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyScale {
    pub identity_draws: usize,
    pub inclusion_samples: usize,
    pub polynomial_draws: usize,
    pub monotone_channels: usize,
    pub monotone_grid: usize,
    pub oracle_instances: usize,
    pub oracle_grid: usize,
    pub ordering_points: usize,
    pub ordering_optimizer: OptimizerConfig,
    pub candidate_tuples: usize,
    pub oracle_systems: usize,
    pub mac_draws: usize,
}

impl Default for VerifyScale {
    fn default() -> Self {
        Self {
            identity_draws: 1000,
            inclusion_samples: 10_000,
            polynomial_draws: 100,
            monotone_channels: 50,
            monotone_grid: 1000,
            oracle_instances: 20,
            oracle_grid: 65,
            ordering_points: 500,
            ordering_optimizer: OptimizerConfig { outer_grid_points: 17, inner_multistarts: 4, ..Default::default() },
            candidate_tuples: 10_000,
            oracle_systems: 200,
            mac_draws: 100,
        }
    }
}

impl VerifyScale {
    /// A few seconds end to end; for smoke tests.
    pub fn smoke() -> Self {
        Self {
            identity_draws: 50,
            inclusion_samples: 200,
            polynomial_draws: 20,
            monotone_channels: 5,
            monotone_grid: 200,
            oracle_instances: 2,
            oracle_grid: 17,
            ordering_points: 10,
            ordering_optimizer: OptimizerConfig { outer_grid_points: 5, inner_multistarts: 2, ..Default::default() },
            candidate_tuples: 200,
            oracle_systems: 20,
            mac_draws: 20,
        }
    }
}

/// A random channel, allocation and genie at which `f` is defined.
/// `symmetric` forces `P1 = P2`.
pub fn random_genie_setup(rng: &mut ChaCha8Rng, symmetric: bool) -> (ChannelParams, PowerAllocation, GenieParams) {
    loop {
        let ch = ChannelParams { power: rng.random_range(0.1..50.0), gain: rng.random_range(0.0..1.0) };
        let alloc = if symmetric {
            PowerAllocation::symmetric(&ch, rng.random_range(0.0..=ch.power))
        } else {
            PowerAllocation::from_private(&ch, rng.random_range(0.0..=ch.power), rng.random_range(0.0..=ch.power))
        };
        let Ok(alloc) = alloc else { continue };
        let gp = GenieParams {
            a1_sq: rng.random_range(0.0..0.95),
            a2_sq: rng.random_range(0.0..0.95),
            v1: rng.random_range(0.01..1.0),
            v2: rng.random_range(0.01..1.0),
        };
        if genie_objective(&ch, &alloc, &gp).is_ok() && build_model(&ch, &alloc, &gp).is_ok() {
            return (ch, alloc, gp);
        }
    }
}

/// `max` that propagates NaN.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn identities(seed: u64, scale: &VerifyScale) -> Vec<PropertyResult> {
    let f_identity = (0..scale.identity_draws).into_par_iter().map(|i| {
        let (ch, alloc, gp) = random_genie_setup(&mut keyed_rng(seed, i as u64), false);
        let f = genie_objective(&ch, &alloc, &gp).unwrap_or(f64::NAN);
        let mi = build_model(&ch, &alloc, &gp).and_then(|m| genie_objective_via_mi(&m)).unwrap_or(f64::NAN);
        rel(f, mi)
    });
    let gap_identity = (0..scale.identity_draws).into_par_iter().map(|i| {
        let (ch, alloc, gp) = random_genie_setup(&mut keyed_rng(seed ^ 0x6a70, i as u64), true);
        let f = genie_objective(&ch, &alloc, &gp).unwrap_or(f64::NAN);
        let r = lower_bound_sum_rate(&ch, alloc.common).unwrap_or(f64::NAN);
        let gap = build_model(&ch, &alloc, &gp).and_then(|m| genie_gap(&m)).unwrap_or(f64::NAN);
        rel(f, r + gap)
    });

    let reference = gamma_a_reference_points(20);
    let smart: Vec<(ChannelParams, PowerAllocation, GenieParams)> = reference
        .iter()
        .filter_map(|ch| {
            let s = smart_genie_solve(ch)?;
            Some((*ch, PowerAllocation::symmetric(ch, 0.0).ok()?, GenieParams::symmetric(s.a_sq, s.b_sq)))
        })
        .collect();
    let missing = reference.len() - smart.len();
    let smart_match = smart.iter().map(|(ch, alloc, gp)| {
        let f = genie_objective(ch, alloc, gp).unwrap_or(f64::NAN);
        (f - lower_bound_sum_rate(ch, 0.0).unwrap_or(f64::NAN)).abs()
    });
    let smart_gap = smart
        .iter()
        .map(|(ch, alloc, gp)| build_model(ch, alloc, gp).and_then(|m| genie_gap(&m)).unwrap_or(f64::NAN));
    let markov = smart.iter().map(|(ch, alloc, gp)| {
        build_model(ch, alloc, gp)
            .and_then(|m| markov_check(&m, &[Signal::X11], &[Signal::Y1Private], &[Signal::U1Private]))
            .map_or(f64::NAN, |c| if c.holds { c.residual } else { f64::INFINITY })
    });
    let entropy = (0..4).map(|i| {
        let (ch, alloc, gp) = random_genie_setup(&mut keyed_rng(seed ^ 0xe7, i), true);
        build_model(&ch, &alloc, &gp)
            .and_then(|m| mc_entropy_check(&m, &[Signal::Y1, Signal::U1], 200_000, seed.wrapping_add(i)))
            .map_or(f64::NAN, |e| e.z_score().abs())
    });

    let mut out = vec![
        PropertyResult::from_residuals("f closed form vs log-det MI (rel)", 1e-9, f_identity.collect::<Vec<_>>()),
        PropertyResult::from_residuals("f = inner bound + genie gap (rel)", 1e-9, gap_identity.collect::<Vec<_>>()),
        PropertyResult::from_residuals("f at smart genie = inner bound", 1e-10, smart_match),
        PropertyResult::from_residuals("genie gap at smart genie", 1e-10, smart_gap),
        PropertyResult::from_residuals("Markov chain at smart genie", 1e-10, markov),
        PropertyResult::from_residuals("Monte Carlo entropy |z|", 5.0, entropy),
    ];
    if missing > 0 {
        out[2].checked += missing;
        out[2].failures += missing;
    }
    out
}

/// Scale of the inclusion polynomial at `c`: the sum of absolute term values.
fn polynomial_scale(c: f64) -> f64 {
    let c = c.abs();
    ((((((c + 6.0) * c + 1.0) * c + 28.0) * c + 31.0) * c + 10.0) * c) + 1.0
}

pub fn regions(seed: u64, scale: &VerifyScale) -> Vec<PropertyResult> {
    let inc = verify_region_inclusion(scale.inclusion_samples, seed);
    let inclusion = PropertyResult {
        name: "inner regime inside decreasing regime",
        checked: inc.samples,
        failures: inc.violations,
        max_residual: inc.violations as f64,
        threshold: 0.0,
    };
    let mut rng = keyed_rng(seed, 0x9017);
    let poly: Vec<f64> = (0..scale.polynomial_draws)
        .map(|_| {
            let c: f64 = rng.random_range(0.0..1.0);
            let (e, f) = inclusion_polynomial(c);
            (e - f).abs() / polynomial_scale(c)
        })
        .collect();

    let monotone: Vec<(f64, f64)> = (0..scale.monotone_channels)
        .into_par_iter()
        .map(|i| {
            let ch = random_gamma_b_channel(&mut keyed_rng(seed ^ 0x30, i as u64));
            monotonicity_residuals(&ch, scale.monotone_grid)
        })
        .collect();
    vec![
        inclusion,
        PropertyResult::from_residuals("inclusion polynomial identity (rel)", 1e-9, poly),
        PropertyResult::from_residuals("R(P0) non-increasing (max step rise)", 1e-12, monotone.iter().map(|m| m.0)),
        PropertyResult::from_residuals("dR/dP0 <= 0 (max slope)", 1e-12, monotone.iter().map(|m| m.1)),
    ]
}

/// A channel with positive gain inside the decreasing regime, `P ≤ 100`.
pub fn random_gamma_b_channel(rng: &mut ChaCha8Rng) -> ChannelParams {
    loop {
        let c: f64 = rng.random_range(0.01..0.41);
        let Some(pb) = gamma_b_boundary_power(c) else { continue };
        let ch = ChannelParams { power: rng.random_range(0.0..=pb.min(100.0)), gain: c };
        if in_gamma_b(&ch) {
            return ch;
        }
    }
}

/// `(largest increase of R between grid neighbours, largest derivative)` on a
/// uniform grid of `[0, P]`.
pub fn monotonicity_residuals(ch: &ChannelParams, grid: usize) -> (f64, f64) {
    let grid = grid.max(2);
    let xs: Vec<f64> = (0..grid).map(|k| (ch.power * k as f64 / (grid - 1) as f64).min(ch.power)).collect();
    let r: Vec<f64> = xs.iter().map(|&x| lower_bound_sum_rate(ch, x).unwrap_or(f64::NAN)).collect();
    let rise = r.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, nan_max);
    let slope = xs
        .iter()
        .map(|&x| sum_rate_derivative(ch, x).map_or(f64::NAN, |s| s.value))
        .fold(f64::NEG_INFINITY, nan_max);
    (rise, slope)
}

pub fn optimizer(seed: u64, scale: &VerifyScale) -> Vec<PropertyResult> {
    let cfg = OptimizerConfig { seed, ..Default::default() };
    let gaps: Vec<f64> = gamma_a_reference_points(scale.oracle_instances)
        .iter()
        .map(|ch| {
            let Ok(alloc) = PowerAllocation::symmetric(ch, 0.0) else { return f64::NAN };
            match (inner_min_g(ch, &alloc, &cfg), brute_force_oracle(ch, &alloc, scale.oracle_grid)) {
                (Some(cert), Some(o)) => (cert.value_bits - o.value).abs(),
                _ => f64::NAN,
            }
        })
        .collect();

    let ordering: Vec<f64> = (0..scale.ordering_points)
        .into_par_iter()
        .map(|i| {
            // redraw until the upper bound is finite
            let mut rng = keyed_rng(seed ^ 0x0d, i as u64);
            loop {
                let ch = ChannelParams { power: rng.random_range(0.0..50.0), gain: rng.random_range(0.0..1.0) };
                let r = ordering_residual(&ch, &OptimizerConfig { seed, ..scale.ordering_optimizer });
                if r != f64::NEG_INFINITY {
                    return r;
                }
            }
        })
        .collect();
    vec![
        PropertyResult::from_residuals("inner minimum vs grid oracle", 5e-3, gaps),
        PropertyResult::from_residuals("upper >= lower (max shortfall)", 1e-9, ordering),
    ]
}

/// `lower − upper` for a channel, or `-inf` when the upper bound is vacuous.
pub fn ordering_residual(ch: &ChannelParams, cfg: &OptimizerConfig) -> f64 {
    let Ok((lower, p0)) = max_lower_bound(ch, 101) else { return f64::NAN };
    let up = upper_bound_with_hints(ch, cfg, &[ch.power - p0]);
    if up.upper_bits.is_finite() {
        lower - up.upper_bits
    } else {
        f64::NEG_INFINITY
    }
}

fn random_rational(rng: &mut ChaCha8Rng, max_num: i64) -> BigRational {
    BigRational::new(rng.random_range(0..=max_num).into(), rng.random_range(1..=6i64).into())
}

/// Six MAC bounds with `a + b ≥ c` and `d + e ≥ f`.
pub fn random_mac_tuple(rng: &mut ChaCha8Rng) -> [BigRational; 6] {
    let a = random_rational(rng, 30);
    let b = random_rational(rng, 30);
    let c = random_rational(rng, 30).min(&a + &b);
    let d = random_rational(rng, 30);
    let e = random_rational(rng, 30);
    let f = random_rational(rng, 30).min(&d + &e);
    [a, b, c, d, e, f]
}

pub fn fme_suite(seed: u64, scale: &VerifyScale) -> Vec<PropertyResult> {
    let objective = ["R0", "R1", "R2"];
    let candidates: Vec<f64> = (0..scale.candidate_tuples)
        .into_par_iter()
        .map(|i| {
            let t = random_mac_tuple(&mut keyed_rng(seed ^ 0xf0, i as u64));
            let [a, b, c, d, e, f] = t.clone();
            let expect = [&a + &b + &e, &b + &d + &e, &c + &e, &b + &f].into_iter().min().expect("four");
            match max_sum_rate(&fme::mac_system(t), &objective) {
                Ok(SumRate::Bounded(v)) if v == expect => 0.0,
                _ => 1.0,
            }
        })
        .collect();

    let systems: Vec<f64> = (0..scale.oracle_systems)
        .into_par_iter()
        .map(|i| {
            let mut rng = keyed_rng(seed ^ 0xf1, i as u64);
            let n = rng.random_range(2..=4);
            let extra = rng.random_range(1..=6);
            let sys = oracle::random_bounded_system(&mut rng, n, extra, 5);
            let names: Vec<&str> = sys.variables().iter().map(String::as_str).collect();
            let want = oracle::max_sum(&sys, &names).ok().flatten();
            match (max_sum_rate(&sys, &names), want) {
                (Ok(SumRate::Bounded(v)), Some(w)) if v == w => 0.0,
                _ => 1.0,
            }
        })
        .collect();

    let mac: Vec<f64> = (0..scale.mac_draws)
        .map(|i| {
            let mut rng = keyed_rng(seed ^ 0xf2, i as u64);
            let ch = ChannelParams { power: rng.random_range(0.0..50.0), gain: rng.random_range(0.0..1.0) };
            let p0 = rng.random_range(0.0..=ch.power);
            let Ok(alloc) = PowerAllocation::symmetric(&ch, p0) else { return f64::NAN };
            let Ok(sys) = fme::mac_system_from_channel(&ch, &alloc) else { return f64::NAN };
            match (max_sum_rate(&sys, &objective), lower_bound_sum_rate(&ch, p0)) {
                (Ok(SumRate::Bounded(v)), Ok(r)) => (fme::to_f64(&v) - r).abs(),
                _ => f64::NAN,
            }
        })
        .collect();
    vec![
        PropertyResult::from_residuals("sum rate = min of four candidates", 0.0, candidates),
        PropertyResult::from_residuals("elimination = vertex oracle", 0.0, systems),
        PropertyResult::from_residuals("MAC projection = inner bound", 1e-9, mac),
    ]
}

pub fn run_suite(suite: Suite, seed: u64, scale: &VerifyScale) -> Vec<PropertyResult> {
    match suite {
        Suite::Identities => identities(seed, scale),
        Suite::Regions => regions(seed, scale),
        Suite::Optimizer => optimizer(seed, scale),
        Suite::Fme => fme_suite(seed, scale),
        Suite::All => [Suite::Identities, Suite::Regions, Suite::Optimizer, Suite::Fme]
            .into_iter()
            .flat_map(|s| run_suite(s, seed, scale))
            .collect(),
    }
}
