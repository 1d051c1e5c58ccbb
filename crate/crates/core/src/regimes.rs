//! Closed-form regime classification.
//!
//! * smart-genie solvability: nonnegative `a, b` with `c(1+c²P) = ab`,
//!   `c²P ≤ √((1-a²-b²)(1-b²)) - b²` and `a² + b² ≤ 1`;
//! * `Γ_A`, the low-interference region where the genie bound is tight;
//! * `Γ_B`, the region where the superposition sum rate is non-increasing in
//!   the common power, together with the pole/zero anatomy of its derivative;
//! * the inclusion `Γ_A ⊂ Γ_B`, checked by sampling.

use std::f64::consts::LN_2;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::ChannelParams;
use crate::rng::keyed_rng;

/// Equalities in the regime inequalities count as inside; this absorbs the
/// rounding of evaluating them in floating point.
pub const BOUNDARY_TOL: f64 = 1e-12;

const A_SQ_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmartGenieSolution {
    pub a_sq: f64,
    pub b_sq: f64,
}

/// How far a candidate is from satisfying the three smart-genie conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmartGenieResiduals {
    /// `|ab - c(1+c²P)|`.
    pub product: f64,
    /// `√((1-a²-b²)(1-b²)) - b² - c²P`; must be `>= 0`.
    pub useful_slack: f64,
    /// `1 - a² - b²`; must be `>= 0`.
    pub norm_slack: f64,
}

impl SmartGenieResiduals {
    pub fn satisfied(&self, tol: f64) -> bool {
        self.product <= tol && self.useful_slack >= -tol && self.norm_slack >= -tol
    }
}

impl SmartGenieSolution {
    pub fn residuals(&self, ch: &ChannelParams) -> SmartGenieResiduals {
        let m = smart_genie_product(ch);
        let (a2, b2) = (self.a_sq, self.b_sq);
        SmartGenieResiduals {
            product: ((a2 * b2).sqrt() - m).abs(),
            useful_slack: useful_slack(ch, a2, b2),
            norm_slack: 1.0 - a2 - b2,
        }
    }
}

/// `m = c(1 + c²P)`, the product `ab` a smart genie must realise.
pub fn smart_genie_product(ch: &ChannelParams) -> f64 {
    ch.gain * (1.0 + ch.gain * ch.gain * ch.power)
}

fn useful_slack(ch: &ChannelParams, a_sq: f64, b_sq: f64) -> f64 {
    let inner = ((1.0 - a_sq - b_sq).max(0.0) * (1.0 - b_sq).max(0.0)).sqrt();
    inner - b_sq - ch.gain * ch.gain * ch.power
}

/// Find smart-genie parameters for `ch`, if any exist.
///
/// Tries `a² = 1/2, b² = 2m²` first, then scans `a² ∈ (0, 1)` on a uniform grid
/// (with `b² = m²/a²`) and polishes the best grid cell by golden-section search
/// on the useful-genie slack. With `c = 0` any `a = 0` genie is smart; the
/// returned point is `a² = 0, b² = 1/4`.
pub fn smart_genie_solve(ch: &ChannelParams) -> Option<SmartGenieSolution> {
    let m = smart_genie_product(ch);
    let accept = |sol: SmartGenieSolution| sol.residuals(ch).satisfied(BOUNDARY_TOL).then_some(sol);
    if m == 0.0 {
        return accept(SmartGenieSolution { a_sq: 0.0, b_sq: 0.25 });
    }
    // ab <= (a² + b²)/2 <= 1/2
    if m > 0.5 + BOUNDARY_TOL {
        return None;
    }
    if let Some(sol) = accept(SmartGenieSolution { a_sq: 0.5, b_sq: 2.0 * m * m }) {
        return Some(sol);
    }

    let m2 = m * m;
    let slack = |a_sq: f64| -> f64 {
        let b_sq = m2 / a_sq;
        if a_sq + b_sq > 1.0 {
            return f64::NEG_INFINITY;
        }
        useful_slack(ch, a_sq, b_sq)
    };
    let step = 1.0 / (A_SQ_GRID as f64 + 1.0);
    let (best_k, best) = (1..=A_SQ_GRID)
        .map(|k| (k, slack(k as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
    let mut a_sq = best_k as f64 * step;
    if best_k > 0 {
        let (lo, hi) = ((best_k - 1) as f64 * step, (best_k + 1) as f64 * step);
        let polished = golden_max(|x| slack(x.max(f64::MIN_POSITIVE)), lo, hi, 80);
        if slack(polished) > best {
            a_sq = polished;
        }
    }
    if !(slack(a_sq) >= -BOUNDARY_TOL) {
        return None;
    }
    accept(SmartGenieSolution { a_sq, b_sq: m2 / a_sq })
}

/// Golden-section maximisation on `[lo, hi]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        x1
    } else {
        x2
    }
}

/// Left-hand sides of the two `Γ_A` inequalities:
/// `(c⁴P² + (4c²P+3)c²(1+c²P)², c(1+c²P))`, each compared with `1/2`.
pub fn gamma_a_lhs(ch: &ChannelParams) -> (f64, f64) {
    let c2p = ch.gain * ch.gain * ch.power;
    let m = smart_genie_product(ch);
    (c2p * c2p + (4.0 * c2p + 3.0) * m * m, m)
}

pub fn in_gamma_a(ch: &ChannelParams) -> bool {
    let (quartic, product) = gamma_a_lhs(ch);
    quartic <= 0.5 + BOUNDARY_TOL && product <= 0.5 + BOUNDARY_TOL
}

/// `(c⁴ + 2c³ + c²)P + c² + 2c - 1`, compared with `0`.
pub fn gamma_b_lhs(ch: &ChannelParams) -> f64 {
    let c = ch.gain;
    let c2 = c * c;
    (c2 * c2 + 2.0 * c2 * c + c2) * ch.power + c2 + 2.0 * c - 1.0
}

pub fn in_gamma_b(ch: &ChannelParams) -> bool {
    gamma_b_lhs(ch) <= BOUNDARY_TOL
}

/// Largest `P` in `Γ_B` for gain `c`: `(1 - 2c - c²)/(c⁴ + 2c³ + c²)`.
///
/// `None` for `c = 0` (every `P` qualifies) and for `c > √2 - 1` (none does).
pub fn gamma_b_boundary_power(c: f64) -> Option<f64> {
    if !(c > 0.0) {
        return None;
    }
    let c2 = c * c;
    let num = 1.0 - 2.0 * c - c2;
    if num < -BOUNDARY_TOL {
        return None;
    }
    Some(num.max(0.0) / (c2 * c2 + 2.0 * c2 * c + c2))
}

/// Largest gain in `Γ_A` at power `p`, by bisection (both left-hand sides grow with `c`).
pub fn gamma_a_gain_limit(power: f64) -> f64 {
    let inside = |c: f64| in_gamma_a(&ChannelParams { power, gain: c });
    let (mut lo, mut hi) = (0.0, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A deterministic spread of `n` channels inside `Γ_A` with `P` spanning `[0.5, 50]`.
pub fn gamma_a_reference_points(n: usize) -> Vec<ChannelParams> {
    (0..n)
        .map(|i| {
            let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
            let power = 0.5 * 100f64.powf(t);
            let frac = 0.15 + 0.8 * ((i * 7) % n.max(1)) as f64 / n.max(1) as f64;
            ChannelParams { power, gain: frac * gamma_a_gain_limit(power) }
        })
        .collect()
}

/// Poles and zero of the sum-rate derivative in the common power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeAnatomy {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub z1: f64,
    /// Relative disagreement between the two ways `z1` is computed.
    pub z1_discrepancy: f64,
}

/// Derivative of the superposition sum rate with respect to common power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumRateSlope {
    /// Bits per channel use per unit power.
    pub value: f64,
    pub anatomy: DerivativeAnatomy,
}

/// Shorthands of the rational form `R = ½[ln((b+dP0)/(a-P0)) + ln((b-eP0)/(a-P0))]`.
#[derive(Debug, Clone, Copy)]
struct RationalForm {
    a: f64,
    b: f64,
    d: f64,
    e: f64,
}

impl RationalForm {
    fn new(ch: &ChannelParams) -> Self {
        let (p, c) = (ch.power, ch.gain);
        let inv_c2 = 1.0 / (c * c);
        RationalForm { a: p + inv_c2, b: p + (1.0 + p) * inv_c2, d: 2.0 / c, e: 1.0 + inv_c2 }
    }

    /// Numerator `αP0 + β` of the derivative.
    fn numerator_coeffs(&self) -> (f64, f64) {
        let RationalForm { a, b, d, e } = *self;
        (b * d - 2.0 * a * e * d - b * e, a * b * d + 2.0 * b * b - a * b * e)
    }
}

pub fn derivative_anatomy(ch: &ChannelParams) -> Result<DerivativeAnatomy> {
    if ch.gain == 0.0 {
        return Err(Error::ZeroGain);
    }
    let form = RationalForm::new(ch);
    let (alpha, beta) = form.numerator_coeffs();
    let z1 = -beta / alpha;

    // Factored form of the same root, cleared of negative powers of c.
    let (p, c) = (ch.power, ch.gain);
    let c2 = c * c;
    let denom = p * c2 * c2 * c + 2.0 * p * c2 * c2 + 2.0 * p * c2 * c + 2.0 * p * c2 + p * c + c2 * c + 2.0 * c2 + c + 4.0;
    let z1_factored = (p * (1.0 + c2) + 1.0) * gamma_b_lhs(ch) / (c * denom);
    let z1_discrepancy = (z1 - z1_factored).abs() / z1_factored.abs().max(f64::MIN_POSITIVE);
    if z1_discrepancy > 1e-6 && (z1 - z1_factored).abs() > 1e-12 {
        log::warn!("zero of sum-rate derivative disagrees between forms: {z1} vs {z1_factored} at {ch:?}");
    }
    Ok(DerivativeAnatomy {
        p1: -form.b / form.d,
        p2: form.a,
        p3: form.b / form.e,
        z1,
        z1_discrepancy,
    })
}

/// `dR/dP0` in closed form, with the anatomy of the rational function.
pub fn sum_rate_derivative(ch: &ChannelParams, common: f64) -> Result<SumRateSlope> {
    if !(0.0..=ch.power).contains(&common) {
        return Err(Error::PowerOutOfRange { common, power: ch.power });
    }
    let anatomy = derivative_anatomy(ch)?;
    let form = RationalForm::new(ch);
    let (alpha, beta) = form.numerator_coeffs();
    let RationalForm { a, b, d, e } = form;
    let x = common;
    let nats = 0.5 * (alpha * x + beta) / ((d * x + b) * (x - a) * (e * x - b));
    Ok(SumRateSlope { value: nats / LN_2, anatomy })
}

/// `c⁶ + 6c⁵ - c⁴ - 28c³ + 31c² - 10c + 1` and `(c-1)²(c²+4c-1)²`, which agree identically.
pub fn inclusion_polynomial(c: f64) -> (f64, f64) {
    let expanded = ((((((c + 6.0) * c - 1.0) * c - 28.0) * c + 31.0) * c - 10.0) * c) + 1.0;
    let q = c * c + 4.0 * c - 1.0;
    let factored = (c - 1.0) * (c - 1.0) * q * q;
    (expanded, factored)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InclusionReport {
    pub samples: usize,
    pub attempts: u64,
    pub violations: usize,
}

const INCLUSION_POWER_CAP: f64 = 1e4;
const MAX_ATTEMPTS_PER_SAMPLE: u64 = 1_000_000;

/// Rejection-sample `Γ_A` and count points that fall outside `Γ_B`.
///
/// Gains are uniform on `[0, 1/2]`; powers are uniform up to the bound implied
/// by `c(1+c²P) ≤ 1/2` alone, capped at `1e4`.
pub fn verify_region_inclusion(samples: usize, seed: u64) -> InclusionReport {
    let per: Vec<(u64, bool)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = keyed_rng(seed, i as u64);
            for attempt in 1..=MAX_ATTEMPTS_PER_SAMPLE {
                let c: f64 = rng.random_range(0.0..=0.5);
                let p_max = if c > 0.0 {
                    ((0.5 / c - 1.0) / (c * c)).clamp(0.0, INCLUSION_POWER_CAP)
                } else {
                    INCLUSION_POWER_CAP
                };
                let p: f64 = rng.random::<f64>() * p_max;
                let ch = ChannelParams { power: p, gain: c };
                if in_gamma_a(&ch) {
                    return (attempt, in_gamma_b(&ch));
                }
            }
            (MAX_ATTEMPTS_PER_SAMPLE, true)
        })
        .collect();
    InclusionReport {
        samples,
        attempts: per.iter().map(|p| p.0).sum(),
        violations: per.iter().filter(|p| !p.1).count(),
    }
}
