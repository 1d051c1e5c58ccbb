//! Channel parameters and the closed-form evaluators everything else is built on.
//!
//! The channel is the symmetric two-user Gaussian interference channel
//!
//! ```text
//! Y1 = X1 + c·X2 + Z1
//! Y2 = X2 + c·X1 + Z2
//! ```
//!
//! with unit-variance noise and per-user power `P`. Both transmitters share a
//! common message carried with power `P0`; the rest of each user's power
//! (`P1`, `P2`) carries the private message. All rates are in bits per channel use.

use crate::error::{Error, ObjectiveTerm, Result};

/// Symmetric power constraint `P` and cross gain `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub power: f64,
    pub gain: f64,
}

impl ChannelParams {
    pub fn new(power: f64, gain: f64) -> Result<Self> {
        if !power.is_finite() || power < 0.0 {
            return Err(Error::InvalidChannel(format!("power must be finite and >= 0, got {power}")));
        }
        if !gain.is_finite() || gain < 0.0 {
            return Err(Error::InvalidChannel(format!("gain must be finite and >= 0, got {gain}")));
        }
        Ok(Self { power, gain })
    }

    pub(crate) fn gain_sq(&self) -> f64 {
        self.gain * self.gain
    }
}

/// Split of each user's power between the common message and its private message.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerAllocation {
    pub common: f64,
    pub private1: f64,
    pub private2: f64,
}

impl PowerAllocation {
    /// `P1 = P2 = P - P0`.
    pub fn symmetric(ch: &ChannelParams, common: f64) -> Result<Self> {
        if !(0.0..=ch.power).contains(&common) {
            return Err(Error::PowerOutOfRange { common, power: ch.power });
        }
        let private = ch.power - common;
        Ok(Self { common, private1: private, private2: private })
    }

    /// General private powers; the common power recorded is the largest one
    /// compatible with both users' constraints.
    pub fn from_private(ch: &ChannelParams, private1: f64, private2: f64) -> Result<Self> {
        for p in [private1, private2] {
            if !(0.0..=ch.power).contains(&p) {
                return Err(Error::InvalidAllocation(format!(
                    "private power {p} outside [0, {}]",
                    ch.power
                )));
            }
        }
        Ok(Self {
            common: ch.power - private1.max(private2),
            private1,
            private2,
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.private1 == self.private2
    }
}

/// Genie parameters: squared noise-correlation coefficients and genie-noise variances.
///
/// Receiver `k` is handed `Uk = c·Xk + Z̃k` where `Var(Z̃k) = vk` and the channel
/// noise decomposes as `Zk = (ak/√vk)·Z̃k + Nk`. The correlation `ak` is taken
/// as the nonnegative root of `ak_sq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenieParams {
    pub a1_sq: f64,
    pub a2_sq: f64,
    pub v1: f64,
    pub v2: f64,
}

impl GenieParams {
    pub fn new(a1_sq: f64, a2_sq: f64, v1: f64, v2: f64) -> Result<Self> {
        let gp = Self { a1_sq, a2_sq, v1, v2 };
        gp.validate()?;
        Ok(gp)
    }

    pub fn symmetric(a_sq: f64, v: f64) -> Self {
        Self { a1_sq: a_sq, a2_sq: a_sq, v1: v, v2: v }
    }

    /// Exchange the roles of the two users.
    pub fn swapped(&self) -> Self {
        Self { a1_sq: self.a2_sq, a2_sq: self.a1_sq, v1: self.v2, v2: self.v1 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("a1_sq", self.a1_sq), ("a2_sq", self.a2_sq)] {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::InvalidGenie(format!("{name} = {a} outside [0, 1]")));
            }
        }
        for (name, v) in [("v1", self.v1), ("v2", self.v2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidGenie(format!("{name} = {v} must be finite and >= 0")));
            }
        }
        Ok(())
    }

    pub fn a1(&self) -> f64 {
        self.a1_sq.sqrt()
    }

    pub fn a2(&self) -> f64 {
        self.a2_sq.sqrt()
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a1_sq, self.a2_sq, self.v1, self.v2]
    }

    pub fn from_array(x: [f64; 4]) -> Self {
        Self { a1_sq: x[0], a2_sq: x[1], v1: x[2], v2: x[3] }
    }
}

/// Outcome classification for a bound computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    Matched,
    GapOpen,
    NoCertificate,
}

impl std::fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundStatus::Matched => "Matched",
            BoundStatus::GapOpen => "GapOpen",
            BoundStatus::NoCertificate => "NoCertificate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RegimeFlags {
    pub in_gamma_a: bool,
    pub in_gamma_b: bool,
    pub smart_genie_solvable: bool,
}

/// Everything known about one `(P, c)` point.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub channel: ChannelParams,
    pub lower_bits: f64,
    /// `+inf` when the genie bound is vacuous.
    pub upper_bits: f64,
    pub gap_bits: f64,
    pub optimal_common: f64,
    /// Private power at which the outer maximum was attained.
    pub upper_argmax_private: Option<f64>,
    /// Genie parameters certifying the upper bound at its argmax.
    pub certificate: Option<GenieParams>,
    /// Closed-form smart-genie pair `(a², b²)` when one exists.
    pub smart_genie: Option<(f64, f64)>,
    pub flags: RegimeFlags,
    pub status: BoundStatus,
}

impl BoundReport {
    /// Classify from the two bounds. `gap <= tol` counts as matched.
    pub fn classify(upper: f64, lower: f64, tol: f64) -> BoundStatus {
        if !upper.is_finite() {
            BoundStatus::NoCertificate
        } else if upper - lower <= tol {
            BoundStatus::Matched
        } else {
            BoundStatus::GapOpen
        }
    }
}

/// Sum rate of superposition coding with successive decoding and interference
/// treated as noise, for the symmetric split `P1 = P2 = P - P0`.
pub fn lower_bound_sum_rate(ch: &ChannelParams, common: f64) -> Result<f64> {
    let alloc = PowerAllocation::symmetric(ch, common)?;
    let c2 = ch.gain_sq();
    let (p1, p2) = (alloc.private1, alloc.private2);
    let shared = (1.0 + ch.gain).powi(2) * common;
    // ln_1p keeps full relative accuracy when the SNRs are small
    let rx1 = ((p1 + shared) / (c2 * p2 + 1.0)).ln_1p();
    let rx2 = (p2 / (c2 * p1 + 1.0)).ln_1p();
    Ok(0.5 * (rx1 + rx2) / std::f64::consts::LN_2)
}

/// `max_{P0 ∈ [0, P]} R(P0)` by a uniform grid of `steps` points and a
/// golden-section polish around the best one. Returns `(value, argmax P0)`;
/// the grid's first maximiser is kept unless the polish improves it by more
/// than rounding noise.
pub fn max_lower_bound(ch: &ChannelParams, steps: usize) -> Result<(f64, f64)> {
    let steps = steps.max(1);
    let p = ch.power;
    let at = |k: usize| if steps == 1 { 0.0 } else { (p * k as f64 / (steps - 1) as f64).min(p) };
    let mut best = (lower_bound_sum_rate(ch, 0.0)?, 0.0);
    let mut best_k = 0;
    for k in 1..steps {
        let v = lower_bound_sum_rate(ch, at(k))?;
        if v > best.0 {
            best = (v, at(k));
            best_k = k;
        }
    }
    if steps > 1 && p > 0.0 {
        let lo = at(best_k.saturating_sub(1));
        let hi = at((best_k + 1).min(steps - 1));
        let r = |x: f64| lower_bound_sum_rate(ch, x.clamp(0.0, p)).unwrap_or(f64::NEG_INFINITY);
        let x = crate::regimes::golden_max(r, lo, hi, 60).clamp(0.0, p);
        let v = r(x);
        // ignore gains at the level of rounding noise
        if v > best.0 + 16.0 * f64::EPSILON * best.0.abs() {
            best = (v, x);
        }
    }
    Ok(best)
}

/// The genie-aided objective `f(P1, P2, a1², v1, a2², v2)`.
///
/// `v1` and `v2` must be strictly positive. A term whose argument is not
/// positive is reported through [`Error::Evaluation`].
pub fn genie_objective(ch: &ChannelParams, alloc: &PowerAllocation, gp: &GenieParams) -> Result<f64> {
    gp.validate()?;
    let p = ch.power;
    let c = ch.gain;
    let c2 = ch.gain_sq();
    let (p1, p2) = (alloc.private1, alloc.private2);

    let cross = ((p - p1) * (p - p2)).max(0.0).sqrt();
    let out_var = p + c2 * p + 2.0 * c * cross + 1.0;
    let output = (out_var * out_var / ((c2 * p1 + 1.0) * (c2 * p2 + 1.0))).log2();

    let rx1 = genie_term(ObjectiveTerm::Receiver1, c, p1, p2, gp.a1(), gp.v1, gp.a2_sq)?;
    let rx2 = genie_term(ObjectiveTerm::Receiver2, c, p2, p1, gp.a2(), gp.v2, gp.a1_sq)?;
    Ok(0.25 * (output + rx1 + rx2))
}

fn genie_term(
    term: ObjectiveTerm,
    c: f64,
    own: f64,
    other: f64,
    a_own: f64,
    v_own: f64,
    a_other_sq: f64,
) -> Result<f64> {
    if v_own <= 0.0 {
        return Err(Error::Evaluation { term, part: "genie variance", value: v_own });
    }
    let c2 = c * c;
    let mix = c * own + a_own * v_own.sqrt();
    let num = (own + c2 * other + 1.0) * (c2 * own + v_own) - mix * mix;
    let den = (c2 * own + 1.0 - a_other_sq) * v_own;
    if num <= 0.0 {
        return Err(Error::Evaluation { term, part: "numerator", value: num });
    }
    if den <= 0.0 {
        return Err(Error::Evaluation { term, part: "denominator", value: den });
    }
    Ok((num / den).log2())
}

/// Smallest slack across the four useful-genie constraints; nonnegative iff feasible.
pub fn useful_genie_slack(ch: &ChannelParams, alloc: &PowerAllocation, gp: &GenieParams) -> f64 {
    let c2 = ch.gain_sq();
    let side = |v: f64, a_other_sq: f64, own: f64| -> f64 {
        let cap = 1.0 - a_other_sq - v;
        let root = (cap.max(0.0) * (1.0 - v).max(0.0)).sqrt() - v - c2 * own;
        v.min(cap).min(root)
    };
    side(gp.v1, gp.a2_sq, alloc.private1).min(side(gp.v2, gp.a1_sq, alloc.private2))
}

/// Membership in the useful-genie set `A(P1, P2)`.
pub fn useful_genie_feasible(ch: &ChannelParams, alloc: &PowerAllocation, gp: &GenieParams) -> bool {
    useful_genie_slack(ch, alloc, gp) >= 0.0
}

/// The six treating-interference-as-noise MAC bounds of the two receivers.
///
/// In the usual lettering these are `a, b, c` at receiver 1 and `d, e, f` at receiver 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacBounds {
    pub common_rx1: f64,
    pub private_rx1: f64,
    pub joint_rx1: f64,
    pub common_rx2: f64,
    pub private_rx2: f64,
    pub joint_rx2: f64,
}

impl MacBounds {
    /// `[a, b, c, d, e, f]`.
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.common_rx1,
            self.private_rx1,
            self.joint_rx1,
            self.common_rx2,
            self.private_rx2,
            self.joint_rx2,
        ]
    }

    /// The four sum-rate candidates `a+b+e, b+d+e, c+e, b+f`.
    pub fn candidates(&self) -> [f64; 4] {
        let [a, b, c, d, e, f] = self.as_array();
        [a + b + e, b + d + e, c + e, b + f]
    }

    /// `min{a+b+e, b+d+e, c+e, b+f}`.
    pub fn sum_rate(&self) -> f64 {
        self.candidates().into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// Per-receiver Gaussian MAC bounds with interference as noise, plus their sum-rate projection.
pub fn mac_sum_rate_closed_form(ch: &ChannelParams, alloc: &PowerAllocation) -> Result<MacBounds> {
    if !alloc.is_symmetric() {
        return Err(Error::AsymmetricAllocation { p1: alloc.private1, p2: alloc.private2 });
    }
    let c2 = ch.gain_sq();
    let shared = (1.0 + ch.gain).powi(2) * alloc.common;
    let half_log = |snr: f64| 0.5 * (1.0 + snr).log2();
    let (p1, p2) = (alloc.private1, alloc.private2);
    let floor1 = c2 * p2 + 1.0;
    let floor2 = c2 * p1 + 1.0;
    Ok(MacBounds {
        common_rx1: half_log(shared / floor1),
        private_rx1: half_log(p1 / floor1),
        joint_rx1: half_log((p1 + shared) / floor1),
        common_rx2: half_log(shared / floor2),
        private_rx2: half_log(p2 / floor2),
        joint_rx2: half_log((p2 + shared) / floor2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(p: f64, c: f64) -> ChannelParams {
        ChannelParams::new(p, c).unwrap()
    }

    #[test]
    fn lower_bound_examples() {
        let v = lower_bound_sum_rate(&ch(10.0, 0.0), 0.0).unwrap();
        assert!((v - 11f64.log2()).abs() < 1e-12);
        let v = lower_bound_sum_rate(&ch(10.0, 0.0), 10.0).unwrap();
        assert!((v - 0.5 * 11f64.log2()).abs() < 1e-12);
        let v = lower_bound_sum_rate(&ch(10.0, 0.1), 0.0).unwrap();
        assert!((v - (1.0 + 10.0 / 1.1f64).log2()).abs() < 1e-12);
        assert!((v - 3.334984247_7).abs() < 1e-9);
    }

    #[test]
    fn lower_bound_rejects_out_of_range_common_power() {
        assert!(matches!(
            lower_bound_sum_rate(&ch(10.0, 0.1), 10.5),
            Err(Error::PowerOutOfRange { .. })
        ));
        assert!(lower_bound_sum_rate(&ch(10.0, 0.1), -1e-9).is_err());
    }

    #[test]
    fn zero_power_is_zero_rate() {
        assert_eq!(lower_bound_sum_rate(&ch(0.0, 0.3), 0.0).unwrap(), 0.0);
        let alloc = PowerAllocation::symmetric(&ch(0.0, 0.3), 0.0).unwrap();
        let f = genie_objective(&ch(0.0, 0.3), &alloc, &GenieParams::symmetric(0.5, 0.18)).unwrap();
        assert!(f.abs() < 1e-15);
    }

    #[test]
    fn channel_rejects_negative_inputs() {
        assert!(ChannelParams::new(-1.0, 0.1).is_err());
        assert!(ChannelParams::new(1.0, -0.1).is_err());
        assert!(ChannelParams::new(f64::NAN, 0.1).is_err());
    }

    #[test]
    fn objective_at_smart_genie_matches_lower_bound() {
        let c = ch(10.0, 0.1);
        let alloc = PowerAllocation::symmetric(&c, 0.0).unwrap();
        let at_genie = genie_objective(&c, &alloc, &GenieParams::symmetric(0.5, 0.0242)).unwrap();
        let lower = lower_bound_sum_rate(&c, 0.0).unwrap();
        assert!((at_genie - lower).abs() < 1e-12, "{at_genie} vs {lower}");
        let off = genie_objective(&c, &alloc, &GenieParams::symmetric(0.5, 0.03)).unwrap();
        assert!(off > at_genie + 1e-4);
    }

    #[test]
    fn objective_identifies_failing_term() {
        let c = ch(10.0, 0.1);
        let alloc = PowerAllocation::symmetric(&c, 0.0).unwrap();
        let err = genie_objective(&c, &alloc, &GenieParams::new(0.5, 0.5, 0.0, 0.1).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Evaluation { term: ObjectiveTerm::Receiver1, .. }));
        let err = genie_objective(&c, &alloc, &GenieParams::new(0.5, 0.5, 0.1, 0.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Evaluation { term: ObjectiveTerm::Receiver2, .. }));
        // a2² = 1 with c²P1 = 0 zeroes receiver 1's denominator.
        let c0 = ch(10.0, 0.0);
        let alloc0 = PowerAllocation::symmetric(&c0, 0.0).unwrap();
        let err = genie_objective(&c0, &alloc0, &GenieParams::new(0.0, 1.0, 0.1, 0.1).unwrap()).unwrap_err();
        assert!(matches!(
            err,
            Error::Evaluation { term: ObjectiveTerm::Receiver1, part: "denominator", .. }
        ));
    }

    #[test]
    fn feasibility_examples() {
        let c = ch(10.0, 0.1);
        let alloc = PowerAllocation::symmetric(&c, 0.0).unwrap();
        assert!(useful_genie_feasible(&c, &alloc, &GenieParams::symmetric(0.5, 0.0242)));
        // v1 above 1 - a2².
        let gp = GenieParams::new(0.5, 0.5, 0.51, 0.0242).unwrap();
        assert!(!useful_genie_feasible(&c, &alloc, &gp));
        let c0 = ch(7.0, 0.0);
        let alloc0 = PowerAllocation::symmetric(&c0, 2.0).unwrap();
        assert!(useful_genie_feasible(&c0, &alloc0, &GenieParams::symmetric(0.0, 0.3)));
        // Empty set once c²P1 exceeds 1.
        let big = ch(10.0, 2.0);
        let alloc_big = PowerAllocation::symmetric(&big, 0.0).unwrap();
        assert!(!useful_genie_feasible(&big, &alloc_big, &GenieParams::symmetric(0.0, 1e-9)));
    }

    #[test]
    fn mac_bounds_examples() {
        let c = ch(10.0, 0.1);
        let alloc = PowerAllocation::symmetric(&c, 0.0).unwrap();
        let mac = mac_sum_rate_closed_form(&c, &alloc).unwrap();
        assert_eq!(mac.common_rx1, 0.0);
        assert_eq!(mac.common_rx2, 0.0);
        assert!((mac.sum_rate() - 3.334984247_7).abs() < 1e-9);

        let c0 = ch(10.0, 0.0);
        let mac0 = mac_sum_rate_closed_form(&c0, &PowerAllocation::symmetric(&c0, 0.0).unwrap()).unwrap();
        assert!((mac0.sum_rate() - 11f64.log2()).abs() < 1e-12);
        assert!((mac0.private_rx1 - 0.5 * 11f64.log2()).abs() < 1e-15);

        // Symmetric split with common power: the min sits on b+f = c+e.
        let alloc = PowerAllocation::symmetric(&c, 4.0).unwrap();
        let mac = mac_sum_rate_closed_form(&c, &alloc).unwrap();
        let [_, _, ce, bf] = mac.candidates();
        assert!((ce - bf).abs() < 1e-12);
        assert!((mac.sum_rate() - ce).abs() < 1e-12);
    }

    #[test]
    fn mac_rejects_asymmetric() {
        let c = ch(10.0, 0.1);
        let alloc = PowerAllocation::from_private(&c, 9.0, 10.0).unwrap();
        assert!(matches!(
            mac_sum_rate_closed_form(&c, &alloc),
            Err(Error::AsymmetricAllocation { .. })
        ));
    }
}
