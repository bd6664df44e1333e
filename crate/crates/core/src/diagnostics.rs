//! Autocorrelation, integrated autocorrelation time and effective sample size.
//!
//! `tau = 1 + 2 sum_{k=1}^{k_max} rho_k` with plain truncation at
//! `k_max = 500`; `ESS = N / tau`. Series that are constant or contain
//! non-finite values have no defined ESS and produce an invalid report.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::sampler::ChainOutput;

/// Default truncation lag.
pub const K_MAX: usize = 500;

/// Below this variance a series counts as constant.
pub const MIN_VARIANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Undefined {
    #[error("series contains non-finite values")]
    NonFinite,
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("series too short for the requested lag")]
    TooShort,
}

/// Sample autocorrelation `rho_0..=rho_{k_max}` with the full-series mean and
/// the lag-0 sum as denominator.
pub fn autocorrelation(series: &[f64], k_max: usize) -> std::result::Result<Vec<f64>, Undefined> {
    let n = series.len();
    if n <= k_max {
        return Err(Undefined::TooShort);
    }
    if !series.iter().all(|v| v.is_finite()) {
        return Err(Undefined::NonFinite);
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let c0 = centered.iter().map(|v| v * v).sum::<f64>();
    if c0 / (n as f64) < MIN_VARIANCE {
        return Err(Undefined::ZeroVariance);
    }

    // Zero-padded FFT gives the linear (non-circular) autocovariance sums.
    let len = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(len);
    let inverse = planner.plan_fft_inverse(len);
    let mut buf: Vec<Complex<f64>> = centered
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(len)
        .collect();
    forward.process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    inverse.process(&mut buf);
    let lag0 = buf[0].re;
    Ok(buf[..=k_max].iter().map(|c| c.re / lag0).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IatOptions {
    pub k_max: usize,
    /// Stop the sum at the first negative autocorrelation.
    pub truncate_at_first_negative: bool,
}

impl Default for IatOptions {
    fn default() -> Self {
        Self { k_max: K_MAX, truncate_at_first_negative: false }
    }
}

/// `1 + 2 sum_{k=1}^{min(500, len-1)} rho_k`.
pub fn iat(acf: &[f64]) -> f64 {
    iat_with(acf, &IatOptions::default())
}

pub fn iat_with(acf: &[f64], opts: &IatOptions) -> f64 {
    let upper = opts.k_max.min(acf.len().saturating_sub(1));
    let mut sum = 0.0;
    for &rho in &acf[1..=upper] {
        if opts.truncate_at_first_negative && rho < 0.0 {
            break;
        }
        sum += rho;
    }
    1.0 + 2.0 * sum
}

/// Mixing summary for one coordinate of a chain. `None` marks the undefined
/// (`nan`) entries of an invalid report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub acf: Vec<f64>,
    /// Truncated sum before clamping at 1.
    pub raw_iat: Option<f64>,
    pub iat: Option<f64>,
    pub ess: Option<f64>,
    pub ess_per_second: Option<f64>,
    pub accept_rate: f64,
    pub divergence_rate: f64,
    pub n: usize,
    pub valid: bool,
    pub undefined_reason: Option<String>,
}

impl MixingReport {
    /// No defined ESS, or most proposals diverged.
    pub fn is_degenerate(&self) -> bool {
        !self.valid || self.divergence_rate > 0.5
    }
}

/// Drops burn-in, extracts `coordinate` and computes ACF, IAT and ESS.
///
/// The reported IAT is clamped below at 1 (so `ESS <= N`); acceptance and
/// divergence rates cover the full chain including burn-in.
pub fn summarize(chain: &ChainOutput, burn_in: usize, wall_time: f64, coordinate: usize) -> Result<MixingReport> {
    summarize_with(chain, burn_in, wall_time, coordinate, &IatOptions::default())
}

pub fn summarize_with(
    chain: &ChainOutput,
    burn_in: usize,
    wall_time: f64,
    coordinate: usize,
    opts: &IatOptions,
) -> Result<MixingReport> {
    if coordinate >= chain.dim {
        return Err(Error::InvalidArgument(format!(
            "coordinate {coordinate} out of range for dimension {}",
            chain.dim
        )));
    }
    if chain.len() <= burn_in {
        return Err(Error::InvalidArgument(format!(
            "chain of length {} has no samples after burn-in {burn_in}",
            chain.len()
        )));
    }
    let series: Vec<f64> = chain.samples[burn_in..].iter().map(|r| r[coordinate]).collect();
    let n = series.len();
    let k_max = opts.k_max.min(n - 1);
    let mut report = MixingReport {
        acf: Vec::new(),
        raw_iat: None,
        iat: None,
        ess: None,
        ess_per_second: None,
        accept_rate: chain.accept_rate(),
        divergence_rate: chain.divergence_rate(),
        n,
        valid: false,
        undefined_reason: None,
    };
    let acf = match autocorrelation(&series, k_max) {
        Ok(acf) => acf,
        Err(e) => {
            report.undefined_reason = Some(e.to_string());
            return Ok(report);
        }
    };
    let raw = iat_with(&acf, &IatOptions { k_max, ..*opts });
    let tau = raw.max(1.0);
    let ess = n as f64 / tau;
    report.acf = acf;
    report.raw_iat = Some(raw);
    report.iat = Some(tau);
    report.ess = Some(ess);
    report.ess_per_second = (wall_time > 0.0).then(|| ess / wall_time);
    report.valid = true;
    Ok(report)
}
