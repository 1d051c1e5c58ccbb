//! Second-moment model of the Gaussian signals of the genie-aided channel.
//!
//! Every signal is a fixed linear combination of seven independent zero-mean
//! Gaussians (the *base*): the common codeword `X0G`, the private codewords
//! `X11G`, `X22G`, the genie noises `Z̃1`, `Z̃2` and the residual channel
//! noises `N1`, `N2`. Covariances of derived signals are obtained by lifting
//! the diagonal base covariance through those loadings, and (conditional)
//! mutual informations come from log-determinants of Schur complements.

use std::f64::consts::{LN_2, PI};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ChannelParams, GenieParams, PowerAllocation};
use crate::rng::keyed_rng;

pub const BASE_DIM: usize = 7;

/// Relative pivot floor below which a covariance block is treated as singular.
const SINGULAR_RTOL: f64 = 1e-12;

/// Named signals of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Signal {
    /// Common codeword, unit variance.
    X0,
    /// Private codeword of user 1, variance `P1`.
    X11,
    /// Private codeword of user 2, variance `P2`.
    X22,
    /// Genie noise `Z̃1`, variance `v1`.
    GenieNoise1,
    GenieNoise2,
    /// Part of `Z1` independent of `Z̃1`, variance `1 - a1²`.
    Residual1,
    Residual2,
    /// `X1G = X11G + √(P-P1)·X0G`.
    X1,
    X2,
    /// `Z1 = (a1/√v1)·Z̃1 + N1`.
    Z1,
    Z2,
    /// `Y1G = X1G + c·X2G + Z1`.
    Y1,
    Y2,
    /// `U1G = c·X1G + Z̃1`.
    U1,
    U2,
    /// `Y1G` with the common codeword removed: `X11G + c·X22G + Z1`.
    Y1Private,
    Y2Private,
    /// `U1G` with the common codeword removed: `c·X11G + Z̃1`.
    U1Private,
    U2Private,
}

/// Joint covariance of the base vector plus the loadings of every derived signal.
#[derive(Debug, Clone)]
pub struct CovarianceModel {
    channel: ChannelParams,
    alloc: PowerAllocation,
    genie: GenieParams,
    base_var: [f64; BASE_DIM],
    common_amp: [f64; 2],
    noise_mix: [f64; 2],
}

pub fn build_model(ch: &ChannelParams, alloc: &PowerAllocation, gp: &GenieParams) -> Result<CovarianceModel> {
    gp.validate()?;
    if gp.v1 <= 0.0 || gp.v2 <= 0.0 {
        return Err(Error::InvalidGenie("genie variances must be strictly positive".into()));
    }
    for p in [alloc.private1, alloc.private2] {
        if !(0.0..=ch.power).contains(&p) {
            return Err(Error::InvalidAllocation(format!("private power {p} outside [0, {}]", ch.power)));
        }
    }
    Ok(CovarianceModel {
        channel: *ch,
        alloc: *alloc,
        genie: *gp,
        base_var: [
            1.0,
            alloc.private1,
            alloc.private2,
            gp.v1,
            gp.v2,
            1.0 - gp.a1_sq,
            1.0 - gp.a2_sq,
        ],
        common_amp: [(ch.power - alloc.private1).sqrt(), (ch.power - alloc.private2).sqrt()],
        noise_mix: [gp.a1() / gp.v1.sqrt(), gp.a2() / gp.v2.sqrt()],
    })
}

type Loading = [f64; BASE_DIM];

impl CovarianceModel {
    pub fn channel(&self) -> &ChannelParams {
        &self.channel
    }

    pub fn allocation(&self) -> &PowerAllocation {
        &self.alloc
    }

    pub fn genie(&self) -> &GenieParams {
        &self.genie
    }

    /// Variances of the seven independent base components, in [`Signal`] order.
    pub fn base_variances(&self) -> [f64; BASE_DIM] {
        self.base_var
    }

    /// Coefficients of `signal` on the base vector.
    pub fn loading(&self, signal: Signal) -> Loading {
        let c = self.channel.gain;
        let unit = |i: usize| {
            let mut l = [0.0; BASE_DIM];
            l[i] = 1.0;
            l
        };
        let add = |x: Loading, y: Loading, s: f64| -> Loading {
            let mut out = x;
            for i in 0..BASE_DIM {
                out[i] += s * y[i];
            }
            out
        };
        match signal {
            Signal::X0 => unit(0),
            Signal::X11 => unit(1),
            Signal::X22 => unit(2),
            Signal::GenieNoise1 => unit(3),
            Signal::GenieNoise2 => unit(4),
            Signal::Residual1 => unit(5),
            Signal::Residual2 => unit(6),
            Signal::X1 => add(unit(1), unit(0), self.common_amp[0]),
            Signal::X2 => add(unit(2), unit(0), self.common_amp[1]),
            Signal::Z1 => add(unit(5), unit(3), self.noise_mix[0]),
            Signal::Z2 => add(unit(6), unit(4), self.noise_mix[1]),
            Signal::Y1 => add(add(self.loading(Signal::X1), self.loading(Signal::X2), c), self.loading(Signal::Z1), 1.0),
            Signal::Y2 => add(add(self.loading(Signal::X2), self.loading(Signal::X1), c), self.loading(Signal::Z2), 1.0),
            Signal::U1 => add(unit(3), self.loading(Signal::X1), c),
            Signal::U2 => add(unit(4), self.loading(Signal::X2), c),
            Signal::Y1Private => add(add(unit(1), unit(2), c), self.loading(Signal::Z1), 1.0),
            Signal::Y2Private => add(add(unit(2), unit(1), c), self.loading(Signal::Z2), 1.0),
            Signal::U1Private => add(unit(3), unit(1), c),
            Signal::U2Private => add(unit(4), unit(2), c),
        }
    }

    /// Cross-covariance block `Cov(rows, cols)`.
    pub fn cross_cov(&self, rows: &[Signal], cols: &[Signal]) -> DMatrix<f64> {
        let lr: Vec<Loading> = rows.iter().map(|&s| self.loading(s)).collect();
        let lc: Vec<Loading> = cols.iter().map(|&s| self.loading(s)).collect();
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            (0..BASE_DIM).map(|k| lr[i][k] * self.base_var[k] * lc[j][k]).sum()
        })
    }

    pub fn cov(&self, signals: &[Signal]) -> DMatrix<f64> {
        let m = self.cross_cov(signals, signals);
        // exact symmetry
        (&m + m.transpose()) * 0.5
    }

    pub fn variance(&self, signal: Signal) -> f64 {
        self.cov(&[signal])[(0, 0)]
    }

    /// Covariance of every named signal; used for PSD sanity checks.
    pub fn full_cov(&self) -> DMatrix<f64> {
        self.cov(ALL_SIGNALS)
    }

    fn scale(&self, signals: &[Signal]) -> f64 {
        signals
            .iter()
            .map(|&s| self.variance(s))
            .fold(1.0, f64::max)
    }

    /// Closed-form differential entropy of a signal set, in bits.
    pub fn entropy_bits(&self, signals: &[Signal]) -> Result<f64> {
        let sigma = self.cov(signals);
        let logdet = pivoted_logdet(&sigma, SINGULAR_RTOL * self.scale(signals))
            .ok_or_else(|| Error::Singular(format!("covariance of {signals:?}")))?;
        let n = signals.len() as f64;
        Ok(0.5 * (n * (2.0 * PI * std::f64::consts::E).ln() + logdet) / LN_2)
    }

    /// Draw `n` base vectors. Chunked by a counter-keyed generator so the
    /// result is independent of thread scheduling.
    pub fn sample_base(&self, n: usize, seed: u64) -> Vec<[f64; BASE_DIM]> {
        let std: Vec<f64> = self.base_var.iter().map(|v| v.sqrt()).collect();
        let chunks = n.div_ceil(MC_CHUNK);
        (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = keyed_rng(seed, chunk as u64);
                let len = MC_CHUNK.min(n - chunk * MC_CHUNK);
                (0..len)
                    .map(|_| {
                        let mut x = [0.0; BASE_DIM];
                        for (xi, s) in x.iter_mut().zip(&std) {
                            let z: f64 = rng.sample(StandardNormal);
                            *xi = s * z;
                        }
                        x
                    })
                    .collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    }
}

const MC_CHUNK: usize = 1 << 15;

pub const ALL_SIGNALS: &[Signal] = &[
    Signal::X0,
    Signal::X11,
    Signal::X22,
    Signal::GenieNoise1,
    Signal::GenieNoise2,
    Signal::Residual1,
    Signal::Residual2,
    Signal::X1,
    Signal::X2,
    Signal::Z1,
    Signal::Z2,
    Signal::Y1,
    Signal::Y2,
    Signal::U1,
    Signal::U2,
    Signal::Y1Private,
    Signal::Y2Private,
    Signal::U1Private,
    Signal::U2Private,
];

/// Log-determinant by Cholesky with diagonal pivoting. `None` when a pivot
/// falls to `floor` or below.
pub(crate) fn pivoted_logdet(m: &DMatrix<f64>, floor: f64) -> Option<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    let mut logdet = 0.0;
    for k in 0..n {
        let (p, piv) = (k..n)
            .map(|i| (i, a[(i, i)]))
            .fold((k, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(piv > floor) {
            return None;
        }
        a.swap_rows(k, p);
        a.swap_columns(k, p);
        logdet += piv.ln();
        let l = piv.sqrt();
        for i in k + 1..n {
            a[(i, k)] /= l;
        }
        for j in k + 1..n {
            for i in k + 1..n {
                a[(i, j)] -= a[(i, k)] * a[(j, k)];
            }
        }
    }
    Some(logdet)
}

fn factor(m: &DMatrix<f64>, floor: f64, block: &str) -> Result<Cholesky<f64, Dyn>> {
    pivoted_logdet(m, floor).ok_or_else(|| Error::Singular(block.to_string()))?;
    Cholesky::new(m.clone()).ok_or_else(|| Error::Singular(block.to_string()))
}

/// `Σ_TT − Σ_TC Σ_CC⁻¹ Σ_CT`, with `Σ` the covariance over `[T, C]`.
fn schur(sigma: &DMatrix<f64>, t: usize, floor: f64, block: &str) -> Result<DMatrix<f64>> {
    let n = sigma.nrows();
    if n == t {
        return Ok(sigma.clone());
    }
    let tt = sigma.view((0, 0), (t, t)).into_owned();
    let tc = sigma.view((0, t), (t, n - t)).into_owned();
    let cc = sigma.view((t, t), (n - t, n - t)).into_owned();
    let chol = factor(&cc, floor, block)?;
    let solved = chol.solve(&tc.transpose());
    let out = tt - tc * solved;
    Ok((&out + out.transpose()) * 0.5)
}

/// `I(targets; observations | conditioners)` in bits.
///
/// Computed as `½·log2(det Σ_{T|C} / det Σ_{T|C,O})` where both conditional
/// covariances are Schur complements. A target block that is fully determined
/// by the conditioners carries zero information; any other singular block is
/// an error naming that block.
pub fn gaussian_cmi(
    model: &CovarianceModel,
    targets: &[Signal],
    observations: &[Signal],
    conditioners: &[Signal],
) -> Result<f64> {
    if targets.is_empty() || observations.is_empty() {
        return Ok(0.0);
    }
    let all: Vec<Signal> = targets.iter().chain(observations).chain(conditioners).copied().collect();
    let floor = SINGULAR_RTOL * model.scale(&all);
    let t = targets.len();
    let o = observations.len();

    // Condition (T, O) on C once, then split.
    let sigma = model.cov(&all);
    let joint = schur(&sigma, t + o, floor, "conditioners")?;
    let given_c = joint.view((0, 0), (t, t)).into_owned();
    let max_diag = given_c.diagonal().iter().copied().fold(0.0, f64::max);
    if max_diag <= floor {
        return Ok(0.0);
    }
    let logdet_c = pivoted_logdet(&given_c, floor)
        .ok_or_else(|| Error::Singular("targets given conditioners".into()))?;
    let given_co = schur(&joint, t, floor, "observations given conditioners")?;
    let logdet_co = pivoted_logdet(&given_co, floor)
        .ok_or_else(|| Error::Singular("targets given observations and conditioners".into()))?;
    Ok(0.5 * (logdet_c - logdet_co) / LN_2)
}

/// The genie objective rebuilt from mutual informations of the Gaussian model:
/// `½[I(X1;Y1,U1|X0) + I(Y1;X1,X0) + I(X2;Y2,U2|X0) + I(Y2;X2,X0)]`.
pub fn genie_objective_via_mi(model: &CovarianceModel) -> Result<f64> {
    use Signal::*;
    let a = gaussian_cmi(model, &[X1], &[Y1, U1], &[X0])?;
    let b = gaussian_cmi(model, &[Y1], &[X1, X0], &[])?;
    let c = gaussian_cmi(model, &[X2], &[Y2, U2], &[X0])?;
    let d = gaussian_cmi(model, &[Y2], &[X2, X0], &[])?;
    Ok(0.5 * (a + b + c + d))
}

/// The superposition-coding sum rate rebuilt from mutual informations, averaged
/// over the two decoding orders:
/// `½[I(X1,X0;Y1) + I(X2;Y2|X0) + I(X2,X0;Y2) + I(X1;Y1|X0)]`.
pub fn inner_bound_via_mi(model: &CovarianceModel) -> Result<f64> {
    use Signal::*;
    let a = gaussian_cmi(model, &[Y1], &[X1, X0], &[])?;
    let b = gaussian_cmi(model, &[X2], &[Y2], &[X0])?;
    let c = gaussian_cmi(model, &[Y2], &[X2, X0], &[])?;
    let d = gaussian_cmi(model, &[X1], &[Y1], &[X0])?;
    Ok(0.5 * (a + b + c + d))
}

/// Excess of the genie objective over the inner bound:
/// `½[I(X1;U1|X0,Y1) + I(X2;U2|X0,Y2)]`.
pub fn genie_gap(model: &CovarianceModel) -> Result<f64> {
    use Signal::*;
    let g1 = gaussian_cmi(model, &[X1], &[U1], &[X0, Y1])?;
    let g2 = gaussian_cmi(model, &[X2], &[U2], &[X0, Y2])?;
    Ok(0.5 * (g1 + g2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkovCheck {
    pub holds: bool,
    pub residual: f64,
}

/// Gaussian Markov test `X → Y → Z` via `Cov(X,Z) = Cov(X,Y)·Cov(Y)⁻¹·Cov(Y,Z)`.
pub fn markov_check(model: &CovarianceModel, x: &[Signal], y: &[Signal], z: &[Signal]) -> Result<MarkovCheck> {
    let all: Vec<Signal> = x.iter().chain(y).chain(z).copied().collect();
    let scale = model.scale(&all);
    let cyy = model.cov(y);
    let chol = factor(&cyy, SINGULAR_RTOL * scale, "middle block")?;
    let cxy = model.cross_cov(x, y);
    let cyz = model.cross_cov(y, z);
    let cxz = model.cross_cov(x, z);
    let predicted = &cxy * chol.solve(&cyz);
    let residual = (cxz - predicted).amax();
    Ok(MarkovCheck { holds: residual <= 1e-10 * scale, residual })
}

/// Monte Carlo check of a closed-form entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    pub closed_form: f64,
    pub estimate: f64,
    pub std_error: f64,
}

impl EntropyEstimate {
    /// Distance between estimate and closed form, in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.estimate - self.closed_form).abs() / self.std_error
    }

    pub fn within(&self, sigmas: f64) -> bool {
        self.z_score() <= sigmas
    }
}

/// Average of `-log2 p(x)` over samples drawn through the signal loadings,
/// with `p` the closed-form Gaussian density. No covariance is estimated from
/// the samples.
pub fn mc_entropy_check(model: &CovarianceModel, signals: &[Signal], samples: usize, seed: u64) -> Result<EntropyEstimate> {
    let closed_form = model.entropy_bits(signals)?;
    let sigma = model.cov(signals);
    let chol = factor(&sigma, SINGULAR_RTOL * model.scale(signals), "sampled signals")?;
    let loadings: Vec<Loading> = signals.iter().map(|&s| model.loading(s)).collect();
    let std: Vec<f64> = model.base_var.iter().map(|v| v.sqrt()).collect();
    let n = signals.len();
    let norm = 0.5 * (n as f64 * (2.0 * PI).ln() + chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum::<f64>());

    let chunks = samples.div_ceil(MC_CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = keyed_rng(seed, chunk as u64);
            let len = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut x = DVector::zeros(n);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..len {
                let mut base = [0.0; BASE_DIM];
                for (b, s) in base.iter_mut().zip(&std) {
                    let z: f64 = rng.sample(StandardNormal);
                    *b = s * z;
                }
                for (xi, l) in x.iter_mut().zip(&loadings) {
                    *xi = l.iter().zip(&base).map(|(a, b)| a * b).sum();
                }
                let w = chol.l().solve_lower_triangular(&x).expect("factor is nonsingular");
                let nll = (norm + 0.5 * w.norm_squared()) / LN_2;
                sum += nll;
                sum_sq += nll * nll;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = partial.into_iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum_sq / m - mean * mean).max(0.0) * m / (m - 1.0);
    Ok(EntropyEstimate { closed_form, estimate: mean, std_error: (var / m).sqrt() })
}
