//! Single-point reports and `(P, c)` grid sweeps with CSV output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::genie::{upper_bound_with_hints, OptimizerConfig};
use crate::model::{max_lower_bound, BoundReport, ChannelParams, RegimeFlags};
use crate::regimes::{in_gamma_a, in_gamma_b, smart_genie_solve};

pub const CSV_HEADER: &str =
    "P,c,in_gamma_A,in_gamma_B,smart_genie,optimal_P0,lower_bits,upper_bits,gap_bits,genie_a_sq,genie_b_sq,status";

pub const DEFAULT_P0_STEPS: usize = 101;
pub const DEFAULT_MATCH_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsOptions {
    pub p0_steps: usize,
    pub match_tol: f64,
    pub optimizer: OptimizerConfig,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        Self { p0_steps: DEFAULT_P0_STEPS, match_tol: DEFAULT_MATCH_TOL, optimizer: OptimizerConfig::default() }
    }
}

/// Lower bound maximised over the common power, genie upper bound (evaluated
/// also at the lower bound's private power), regime flags and status.
pub fn bounds_report(ch: &ChannelParams, opts: &BoundsOptions) -> Result<BoundReport> {
    opts.optimizer.validate()?;
    let (lower, p0) = max_lower_bound(ch, opts.p0_steps)?;
    let up = upper_bound_with_hints(ch, &opts.optimizer, &[ch.power - p0]);
    let smart = smart_genie_solve(ch);
    let flags = RegimeFlags {
        in_gamma_a: in_gamma_a(ch),
        in_gamma_b: in_gamma_b(ch),
        smart_genie_solvable: smart.is_some(),
    };
    Ok(BoundReport {
        channel: *ch,
        lower_bits: lower,
        upper_bits: up.upper_bits,
        gap_bits: up.upper_bits - lower,
        optimal_common: p0,
        upper_argmax_private: up.argmax_private,
        certificate: up.certificate.map(|c| c.gp),
        smart_genie: smart.map(|s| (s.a_sq, s.b_sq)),
        flags,
        status: BoundReport::classify(up.upper_bits, lower, opts.match_tol),
    })
}

/// `%.12g`, with `inf`, `-inf` and `nan` spelled out.
pub fn fmt_g12(x: f64) -> String {
    const SIG: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -4 || exp >= SIG {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{:.*}", (SIG - 1 - exp) as usize, x))
    }
}

pub fn csv_row(r: &BoundReport) -> String {
    let (a, b) = r.smart_genie.unwrap_or((f64::NAN, f64::NAN));
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}",
        fmt_g12(r.channel.power),
        fmt_g12(r.channel.gain),
        r.flags.in_gamma_a,
        r.flags.in_gamma_b,
        r.flags.smart_genie_solvable,
        fmt_g12(r.optimal_common),
        fmt_g12(r.lower_bits),
        fmt_g12(r.upper_bits),
        fmt_g12(r.gap_bits),
        fmt_g12(a),
        fmt_g12(b),
        r.status
    )
}

/// Human-readable multi-line report.
pub fn format_report(r: &BoundReport) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), fmt_g12);
    let mut s = String::new();
    let mut line = |k: &str, v: String| {
        let _ = writeln!(s, "{k:<22}{v}");
    };
    line("P", fmt_g12(r.channel.power));
    line("c", fmt_g12(r.channel.gain));
    line("lower_bits", fmt_g12(r.lower_bits));
    line("optimal_P0", fmt_g12(r.optimal_common));
    line("upper_bits", fmt_g12(r.upper_bits));
    line("upper_argmax_P1", opt(r.upper_argmax_private));
    line("gap_bits", fmt_g12(r.gap_bits));
    line("in_gamma_A", r.flags.in_gamma_a.to_string());
    line("in_gamma_B", r.flags.in_gamma_b.to_string());
    match r.smart_genie {
        Some((a, b)) => line("smart_genie", format!("a^2={} b^2={}", fmt_g12(a), fmt_g12(b))),
        None => line("smart_genie", "none".into()),
    }
    match r.certificate {
        Some(g) => line(
            "certificate",
            format!("a1^2={} a2^2={} v1={} v2={}", fmt_g12(g.a1_sq), fmt_g12(g.a2_sq), fmt_g12(g.v1), fmt_g12(g.v2)),
        ),
        None => line("certificate", "none".into()),
    }
    line("status", r.status.to_string());
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub p_min: f64,
    pub p_max: f64,
    pub p_steps: usize,
    pub c_min: f64,
    pub c_max: f64,
    pub c_steps: usize,
    pub bounds: BoundsOptions,
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            p_min: 1.0,
            p_max: 50.0,
            p_steps: 5,
            c_min: 0.01,
            c_max: 0.45,
            c_steps: 5,
            bounds: BoundsOptions::default(),
            out: None,
        }
    }
}

fn axis(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![lo];
    }
    (0..steps).map(|i| if i + 1 == steps { hi } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 }).collect()
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if !(self.p_min >= 0.0 && self.p_min <= self.p_max && self.p_max.is_finite()) {
            return bad("need 0 <= P-min <= P-max < inf");
        }
        if !(self.c_min >= 0.0 && self.c_min <= self.c_max && self.c_max.is_finite()) {
            return bad("need 0 <= c-min <= c-max < inf");
        }
        if self.p_steps == 0 || self.c_steps == 0 || self.bounds.p0_steps == 0 {
            return bad("step counts must be >= 1");
        }
        if !(self.bounds.match_tol >= 0.0) {
            return bad("tol must be >= 0");
        }
        self.bounds.optimizer.validate()
    }

    /// Grid points in row-major order, `P` outer and `c` inner.
    pub fn points(&self) -> Vec<ChannelParams> {
        let cs = axis(self.c_min, self.c_max, self.c_steps);
        axis(self.p_min, self.p_max, self.p_steps)
            .into_iter()
            .flat_map(|p| cs.iter().map(move |&c| ChannelParams { power: p, gain: c }))
            .collect()
    }
}

/// Worker count from `ICB_THREADS`; `0` or unset means automatic.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var("ICB_THREADS") {
        Ok(s) => s.trim().parse().map_err(|_| Error::Config(format!("ICB_THREADS must be a non-negative integer, got `{s}`"))),
        Err(_) => Ok(0),
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (`0` = automatic).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Full CSV text for the sweep, header included. Row order does not depend on
/// `threads`.
pub fn sweep_csv(cfg: &SweepConfig, threads: usize) -> Result<String> {
    cfg.validate()?;
    let points = cfg.points();
    let rows: Vec<Result<String>> = with_threads(threads, || {
        points.par_iter().map(|ch| bounds_report(ch, &cfg.bounds).map(|r| csv_row(&r))).collect()
    })?;
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r?);
        out.push('\n');
    }
    Ok(out)
}

/// [`sweep_csv`], written to `cfg.out` when set. Returns the CSV text.
pub fn run_sweep(cfg: &SweepConfig, threads: usize) -> Result<String> {
    let csv = sweep_csv(cfg, threads)?;
    if let Some(path) = &cfg.out {
        std::fs::write(path, &csv)?;
    }
    Ok(csv)
}

/// `key = value` lines; `#` comments and blank lines ignored. Keys are
/// normalised to lower case with `_` replaced by `-`, so `P_min`, `p-min` and
/// `P-min` are the same key.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse { line: i + 1, message: "expected `key = value`".into() })?;
        let key = normalize_key(k);
        if key.is_empty() {
            return Err(Error::Parse { line: i + 1, message: "empty key".into() });
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

pub fn normalize_key(k: &str) -> String {
    k.trim().trim_start_matches("--").to_ascii_lowercase().replace('_', "-")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_formatting() {
        assert_eq!(fmt_g12(0.0), "0");
        assert_eq!(fmt_g12(10.0), "10");
        assert_eq!(fmt_g12(0.1), "0.1");
        assert_eq!(fmt_g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_g12(3.33496955118), "3.33496955118");
        assert_eq!(fmt_g12(1.5e-5), "1.5e-05");
        assert_eq!(fmt_g12(-2.5e-7), "-2.5e-07");
        assert_eq!(fmt_g12(1e12), "1e+12");
        assert_eq!(fmt_g12(123456789012.0), "123456789012");
        assert_eq!(fmt_g12(0.0001), "0.0001");
        assert_eq!(fmt_g12(f64::INFINITY), "inf");
        assert_eq!(fmt_g12(f64::NAN), "nan");
        assert_eq!(fmt_g12(9.9999999999999e-5), "0.0001");
    }

    #[test]
    fn grid_is_row_major() {
        let cfg = SweepConfig { p_steps: 2, c_steps: 3, ..Default::default() };
        let pts = cfg.points();
        assert_eq!(pts.len(), 6);
        assert_eq!((pts[0].power, pts[0].gain), (1.0, 0.01));
        assert_eq!((pts[2].power, pts[2].gain), (1.0, 0.45));
        assert_eq!((pts[3].power, pts[3].gain), (50.0, 0.01));
    }

    #[test]
    fn config_parsing() {
        let m = parse_config("# grid\nP_min = 2\n--c-max=0.3\n\nseed = 9 # trailing\n").unwrap();
        assert_eq!(m["p-min"], "2");
        assert_eq!(m["c-max"], "0.3");
        assert_eq!(m["seed"], "9");
        assert!(matches!(parse_config("x = 1\noops"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn bounds_examples() {
        let quick = BoundsOptions {
            optimizer: OptimizerConfig { outer_grid_points: 9, inner_multistarts: 4, ..Default::default() },
            ..Default::default()
        };
        let r = bounds_report(&ChannelParams::new(10.0, 0.1).unwrap(), &quick).unwrap();
        assert_eq!(r.status, crate::model::BoundStatus::Matched);
        assert_eq!(r.optimal_common, 0.0);
        assert!((r.lower_bits - 3.334984247_7).abs() < 1e-9);

        let r = bounds_report(&ChannelParams::new(10.0, 2.0).unwrap(), &quick).unwrap();
        assert_eq!(r.status, crate::model::BoundStatus::NoCertificate);
        assert!(r.upper_bits.is_infinite());
        assert!(csv_row(&r).contains(",inf,inf,"));

        let r = bounds_report(&ChannelParams::new(0.0, 0.3).unwrap(), &quick).unwrap();
        assert_eq!(r.lower_bits, 0.0);
        // log-ratios of unit variances, zero up to rounding
        assert!(r.upper_bits.abs() < 1e-12, "{}", r.upper_bits);
        assert_eq!(r.status, crate::model::BoundStatus::Matched);
    }
}
