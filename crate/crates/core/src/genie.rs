//! Numerical evaluation of the genie-aided upper bound
//!
//! ```text
//! upper = max_{0 ≤ P1 = P2 ≤ P}  g(P1, P2),    g = min_{A(P1,P2)} f
//! ```
//!
//! The inner minimum is a four-dimensional constrained search over
//! `(a1², a2², v1, v2)`; infeasible points are rejected rather than penalised.
//! The outer maximum is a dense grid with a local golden-section polish.
//! [`brute_force_oracle`] is an exhaustive grid used to validate both.

use rand::Rng;
use rayon::prelude::*;

use crate::model::{genie_objective, useful_genie_slack, ChannelParams, GenieParams, PowerAllocation};
use crate::regimes::{golden_max, smart_genie_solve};
use crate::rng::keyed_rng;
use crate::simplex::{minimize, SimplexOptions};

/// Smallest genie-noise variance the search will consider.
pub const MIN_GENIE_VARIANCE: f64 = 1e-9;

const RANDOM_START_TRIES: usize = 256;
const OUTER_REFINE_ITERS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub outer_grid_points: usize,
    pub inner_multistarts: usize,
    pub inner_max_iters: usize,
    pub feasibility_tol: f64,
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            outer_grid_points: 257,
            inner_multistarts: 32,
            inner_max_iters: 500,
            feasibility_tol: 1e-10,
            value_tol: 1e-7,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.outer_grid_points == 0 || self.inner_multistarts == 0 || self.inner_max_iters == 0 {
            return Err(crate::Error::Config("optimizer counts must be >= 1".into()));
        }
        if !(self.feasibility_tol > 0.0) || !(self.value_tol > 0.0) {
            return Err(crate::Error::Config("optimizer tolerances must be > 0".into()));
        }
        Ok(())
    }
}

/// A feasible genie witnessing `g(P1, P2) <= value_bits`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenieCertificate {
    pub gp: GenieParams,
    pub value_bits: f64,
    pub feasible: bool,
    pub alloc: PowerAllocation,
}

fn objective(ch: &ChannelParams, alloc: &PowerAllocation, tol: f64, x: &[f64; 4]) -> f64 {
    let [a1, a2, v1, v2] = *x;
    if !(0.0..=1.0).contains(&a1)
        || !(0.0..=1.0).contains(&a2)
        || !(MIN_GENIE_VARIANCE..=1.0).contains(&v1)
        || !(MIN_GENIE_VARIANCE..=1.0).contains(&v2)
    {
        return f64::INFINITY;
    }
    let gp = GenieParams::from_array(*x);
    if useful_genie_slack(ch, alloc, &gp) < -tol {
        return f64::INFINITY;
    }
    genie_objective(ch, alloc, &gp).unwrap_or(f64::INFINITY)
}

/// `g(P1, P2)`: best feasible genie found by multistart simplex search, or
/// `None` when the useful-genie set is empty.
pub fn inner_min_g(ch: &ChannelParams, alloc: &PowerAllocation, cfg: &OptimizerConfig) -> Option<GenieCertificate> {
    inner_min_keyed(ch, alloc, cfg, 0)
}

pub(crate) fn inner_min_keyed(
    ch: &ChannelParams,
    alloc: &PowerAllocation,
    cfg: &OptimizerConfig,
    key: u64,
) -> Option<GenieCertificate> {
    let tol = cfg.feasibility_tol;
    let eval = |x: &[f64; 4]| objective(ch, alloc, tol, x);
    let feasible = |x: &[f64; 4]| eval(x).is_finite();
    let p_max = alloc.private1.max(alloc.private2);
    let c2 = ch.gain * ch.gain;
    // The root term peaks at 1 - 2·MIN_GENIE_VARIANCE (a = 0, v minimal), so
    // beyond this the useful set is empty even with the tolerance.
    if c2 * p_max > 1.0 - 2.0 * MIN_GENIE_VARIANCE + tol {
        return None;
    }

    let mut starts: Vec<[f64; 4]> = Vec::with_capacity(cfg.inner_multistarts + 2);
    if let Some(sol) = smart_genie_solve(&ChannelParams { power: p_max, gain: ch.gain }) {
        let x = [sol.a_sq, sol.a_sq, sol.b_sq, sol.b_sq];
        if feasible(&x) {
            starts.push(x);
        }
    }
    // Uncorrelated genie halfway into the feasible v-range.
    let v = 0.25 * (1.0 - c2 * p_max);
    if v >= MIN_GENIE_VARIANCE {
        let x = [0.0, 0.0, v, v];
        if feasible(&x) {
            starts.push(x);
        }
    }
    let mut rng = keyed_rng(cfg.seed, key);
    for _ in 0..cfg.inner_multistarts {
        for _ in 0..RANDOM_START_TRIES {
            let a1: f64 = rng.random();
            let a2: f64 = rng.random();
            let v1 = MIN_GENIE_VARIANCE + rng.random::<f64>() * (1.0 - a2 - MIN_GENIE_VARIANCE).max(0.0);
            let v2 = MIN_GENIE_VARIANCE + rng.random::<f64>() * (1.0 - a1 - MIN_GENIE_VARIANCE).max(0.0);
            let x = [a1, a2, v1, v2];
            if feasible(&x) {
                starts.push(x);
                break;
            }
        }
    }
    if starts.is_empty() {
        let coarse = brute_force_oracle(ch, alloc, 33)?;
        starts.push(coarse.argmin.as_array());
    }

    let opts = SimplexOptions {
        max_iters: cfg.inner_max_iters,
        ftol: (cfg.value_tol * 1e-4).max(1e-15),
        ..Default::default()
    };
    let mut best: Option<([f64; 4], f64)> = None;
    for x0 in starts {
        let mut r = minimize(eval, x0, &opts);
        // one restart from the converged point to escape a collapsed simplex
        let again = minimize(eval, r.x, &SimplexOptions { initial_step: 0.01, ..opts });
        if again.value < r.value {
            r = again;
        }
        if best.is_none_or(|(_, v)| r.value < v) {
            best = Some((r.x, r.value));
        }
    }
    let (x, _) = best.filter(|(_, v)| v.is_finite())?;
    let gp = GenieParams::from_array(x);
    let value_bits = genie_objective(ch, alloc, &gp).ok()?;
    Some(GenieCertificate {
        gp,
        value_bits,
        feasible: useful_genie_slack(ch, alloc, &gp) >= -tol,
        alloc: *alloc,
    })
}

/// Result of the outer maximisation.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperBound {
    /// `+inf` when some admissible `P1` has an empty useful-genie set.
    pub upper_bits: f64,
    /// Smallest private power whose value is within `value_tol` of the maximum.
    pub argmax_private: Option<f64>,
    pub certificate: Option<GenieCertificate>,
    /// Every `(P1, g(P1, P1))` evaluated, sorted by `P1`.
    pub profile: Vec<(f64, f64)>,
}

impl UpperBound {
    fn vacuous() -> Self {
        Self { upper_bits: f64::INFINITY, argmax_private: None, certificate: None, profile: Vec::new() }
    }
}

pub fn upper_bound_sum_capacity(ch: &ChannelParams, cfg: &OptimizerConfig) -> UpperBound {
    upper_bound_with_hints(ch, cfg, &[])
}

/// As [`upper_bound_sum_capacity`], additionally evaluating `g` at the given
/// private powers (for example the split that maximises the inner bound).
pub fn upper_bound_with_hints(ch: &ChannelParams, cfg: &OptimizerConfig, hints: &[f64]) -> UpperBound {
    let n = cfg.outer_grid_points.max(1);
    let p = ch.power;
    let grid_point = |k: usize| if n == 1 { p } else { p * k as f64 / (n - 1) as f64 };
    let at = |p1: f64, key: u64| -> Option<GenieCertificate> {
        let alloc = PowerAllocation::symmetric(ch, (p - p1).clamp(0.0, p)).ok()?;
        inner_min_keyed(ch, &alloc, cfg, key)
    };

    let grid: Vec<Option<GenieCertificate>> = (0..n).into_par_iter().map(|k| at(grid_point(k), k as u64)).collect();
    let Some(grid) = grid.into_iter().collect::<Option<Vec<_>>>() else {
        return UpperBound::vacuous();
    };
    let mut evaluated: Vec<GenieCertificate> = grid;

    let (best_k, _) = evaluated
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, c)| if c.value_bits > acc.1 { (k, c.value_bits) } else { acc });
    if n > 1 {
        let lo = grid_point(best_k.saturating_sub(1));
        let hi = grid_point((best_k + 1).min(n - 1));
        let mut key = n as u64;
        let mut polish = Vec::new();
        {
            let probe = |p1: f64| -> f64 {
                let k = key;
                key += 1;
                match at(p1, k) {
                    Some(cert) => {
                        polish.push(cert);
                        cert.value_bits
                    }
                    None => f64::NEG_INFINITY,
                }
            };
            let probe = std::cell::RefCell::new(probe);
            golden_max(|x| (probe.borrow_mut())(x), lo, hi, OUTER_REFINE_ITERS);
        }
        evaluated.extend(polish);
    }
    for (j, &h) in hints.iter().enumerate() {
        if (0.0..=p).contains(&h) {
            if let Some(cert) = at(h, (2 * n + OUTER_REFINE_ITERS + 8 + j) as u64) {
                evaluated.push(cert);
            }
        }
    }

    let upper = evaluated.iter().map(|c| c.value_bits).fold(f64::NEG_INFINITY, f64::max);
    let chosen = evaluated
        .iter()
        .filter(|c| c.value_bits >= upper - cfg.value_tol)
        .min_by(|a, b| a.alloc.private1.total_cmp(&b.alloc.private1))
        .copied();
    let mut profile: Vec<(f64, f64)> = evaluated.iter().map(|c| (c.alloc.private1, c.value_bits)).collect();
    profile.sort_by(|a, b| a.0.total_cmp(&b.0));
    UpperBound {
        upper_bits: upper,
        argmax_private: chosen.map(|c| c.alloc.private1),
        certificate: chosen,
        profile,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleMinimum {
    pub value: f64,
    pub argmin: GenieParams,
}

/// Exhaustive minimum of `f` over the `grid_per_axis⁴` grid on `[0,1]⁴`
/// intersected with the useful-genie set. Grid variances of `0` are replaced
/// by [`MIN_GENIE_VARIANCE`]. Ties go to the lexicographically first grid index.
pub fn brute_force_oracle(ch: &ChannelParams, alloc: &PowerAllocation, grid_per_axis: usize) -> Option<OracleMinimum> {
    let axis: Vec<f64> = (0..grid_per_axis.max(2))
        .map(|i| i as f64 / (grid_per_axis.max(2) - 1) as f64)
        .collect();
    grid_search(ch, alloc, [&axis, &axis, &axis, &axis])
}

/// [`brute_force_oracle`] followed by one finer grid of the same size spanning
/// the neighbouring cells of the coarse minimiser.
pub fn brute_force_oracle_refined(ch: &ChannelParams, alloc: &PowerAllocation, grid_per_axis: usize) -> Option<OracleMinimum> {
    let coarse = brute_force_oracle(ch, alloc, grid_per_axis)?;
    let n = grid_per_axis.max(2);
    let h = 1.0 / (n - 1) as f64;
    let axes: Vec<Vec<f64>> = coarse
        .argmin
        .as_array()
        .iter()
        .map(|&centre| {
            let (lo, hi) = ((centre - h).max(0.0), (centre + h).min(1.0));
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        })
        .collect();
    let fine = grid_search(ch, alloc, [&axes[0], &axes[1], &axes[2], &axes[3]]);
    match fine {
        Some(f) if f.value < coarse.value => Some(f),
        _ => Some(coarse),
    }
}

fn grid_search(ch: &ChannelParams, alloc: &PowerAllocation, axes: [&[f64]; 4]) -> Option<OracleMinimum> {
    let clamp_v = |v: f64| v.max(MIN_GENIE_VARIANCE);
    let best = (0..axes[0].len())
        .into_par_iter()
        .map(|i| {
            let mut best: Option<(f64, [usize; 4])> = None;
            for j in 0..axes[1].len() {
                for k in 0..axes[2].len() {
                    for l in 0..axes[3].len() {
                        let gp = GenieParams {
                            a1_sq: axes[0][i],
                            a2_sq: axes[1][j],
                            v1: clamp_v(axes[2][k]),
                            v2: clamp_v(axes[3][l]),
                        };
                        if useful_genie_slack(ch, alloc, &gp) < 0.0 {
                            continue;
                        }
                        let Ok(v) = genie_objective(ch, alloc, &gp) else { continue };
                        if best.is_none_or(|(b, _)| v < b) {
                            best = Some((v, [i, j, k, l]));
                        }
                    }
                }
            }
            best
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, [usize; 4])>, cur| match acc {
            Some(a) if a.0 <= cur.0 => Some(a),
            _ => Some(cur),
        })?;
    let [i, j, k, l] = best.1;
    Some(OracleMinimum {
        value: best.0,
        argmin: GenieParams {
            a1_sq: axes[0][i],
            a2_sq: axes[1][j],
            v1: clamp_v(axes[2][k]),
            v2: clamp_v(axes[3][l]),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::lower_bound_sum_rate;

    fn ch(p: f64, c: f64) -> ChannelParams {
        ChannelParams::new(p, c).unwrap()
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig { outer_grid_points: 17, inner_multistarts: 6, ..Default::default() }
    }

    #[test]
    fn inner_min_matches_lower_bound_in_regime() {
        let c = ch(10.0, 0.1);
        let alloc = PowerAllocation::symmetric(&c, 0.0).unwrap();
        let cert = inner_min_g(&c, &alloc, &OptimizerConfig::default()).unwrap();
        let lower = lower_bound_sum_rate(&c, 0.0).unwrap();
        assert!((cert.value_bits - lower).abs() < 1e-9, "{} vs {lower}", cert.value_bits);
        assert!(cert.feasible);
        // Any minimiser sits on the smart-genie curve a1·√v1 = c(1 + c²P).
        let m = 0.1 * 1.1;
        assert!((cert.gp.a1() * cert.gp.v1.sqrt() - m).abs() < 1e-3);
    }

    #[test]
    fn inner_min_without_interference() {
        let c = ch(6.0, 0.0);
        let alloc = PowerAllocation::symmetric(&c, 0.0).unwrap();
        let cert = inner_min_g(&c, &alloc, &quick()).unwrap();
        let reference = genie_objective(&c, &alloc, &GenieParams::symmetric(0.0, 0.5)).unwrap();
        assert!(cert.value_bits <= reference + 1e-12);
        assert!((cert.value_bits - 7f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn empty_useful_set_has_no_certificate() {
        let c = ch(10.0, 2.0);
        let alloc = PowerAllocation::symmetric(&c, 0.0).unwrap();
        assert!(inner_min_g(&c, &alloc, &quick()).is_none());
        assert!(brute_force_oracle(&c, &alloc, 2).is_none());
        assert!(brute_force_oracle(&c, &alloc, 33).is_none());
        let up = upper_bound_sum_capacity(&c, &quick());
        assert!(up.upper_bits.is_infinite() && up.certificate.is_none());
    }

    #[test]
    fn upper_bound_matches_in_regime() {
        let c = ch(10.0, 0.1);
        let up = upper_bound_sum_capacity(&c, &quick());
        let lower = lower_bound_sum_rate(&c, 0.0).unwrap();
        assert!((up.upper_bits - lower).abs() < 1e-9);
        // g is flat to within value_tol just below P1 = P; the tie-break keeps the smallest such P1
        let arg = up.argmax_private.unwrap();
        assert!((arg - 10.0).abs() < 1e-3, "{arg}");
        assert!(up.certificate.unwrap().value_bits >= up.upper_bits - quick().value_tol);
    }

    #[test]
    fn oracle_grids_are_nested() {
        let c = ch(10.0, 0.1);
        let alloc = PowerAllocation::symmetric(&c, 0.0).unwrap();
        let coarse = brute_force_oracle(&c, &alloc, 9).unwrap();
        let fine = brute_force_oracle(&c, &alloc, 17).unwrap();
        assert!(fine.value <= coarse.value + 1e-12);
        let refined = brute_force_oracle_refined(&c, &alloc, 9).unwrap();
        assert!(refined.value <= coarse.value);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let c = ch(4.0, 0.3);
        let cfg = OptimizerConfig { seed: 11, ..quick() };
        assert_eq!(upper_bound_sum_capacity(&c, &cfg), upper_bound_sum_capacity(&c, &cfg));
    }
}
