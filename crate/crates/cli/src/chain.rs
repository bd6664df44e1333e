//! Single q-HMC chain on a registered potential.

use anyhow::Result;
use qhmc_core::diagnostics::{summarize, MixingReport};
use qhmc_core::potentials::PotentialRegistry;
use qhmc_core::sampler::{run_chain, ChainOutput};
use serde::Serialize;

use crate::config::{ConfigError, ExperimentConfig};
use crate::output;
use crate::runner;

#[derive(Debug, Clone, Serialize)]
pub struct ChainSummary {
    pub q: f64,
    pub seed: u64,
    pub final_dt: f64,
    pub posterior_mean: Vec<f64>,
    pub posterior_std: Vec<f64>,
    pub mixing: MixingReport,
}

pub fn posterior_moments(samples: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let dim = samples.first().map_or(0, Vec::len);
    let n = samples.len() as f64;
    let mean: Vec<f64> = (0..dim).map(|i| samples.iter().map(|s| s[i]).sum::<f64>() / n).collect();
    let std = (0..dim)
        .map(|i| {
            let ss: f64 = samples.iter().map(|s| (s[i] - mean[i]).powi(2)).sum();
            if samples.len() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 }
        })
        .collect();
    (mean, std)
}

pub fn simulate(cfg: &ExperimentConfig, registry: &PotentialRegistry) -> Result<(ChainOutput, ChainSummary)> {
    let potential = registry.build(&cfg.target.name, &cfg.target.params()).map_err(ConfigError::from)?;
    let dim = potential.dim();
    let h = runner::hamiltonian(cfg, potential)?;
    let x0 = runner::initial_state(cfg, dim)?;
    let coord = runner::check_coordinate(cfg, dim)?;
    let sc = runner::sampler_config(cfg, cfg.sampler.q, cfg.sampler.seed)?;
    let chain = run_chain(&x0, &h, &sc)?;
    let mixing = summarize(&chain, sc.burn_in, chain.wall_time, coord)?;
    let (posterior_mean, posterior_std) = posterior_moments(chain.post_burn_in());
    let summary =
        ChainSummary { q: cfg.sampler.q, seed: cfg.sampler.seed, final_dt: chain.final_dt, posterior_mean, posterior_std, mixing };
    Ok((chain, summary))
}

/// Writes `samples.csv`, `acf.csv`, `histogram.csv` and `metadata.json`.
pub fn run_single(cfg: &ExperimentConfig, registry: &PotentialRegistry) -> Result<ChainSummary> {
    let (chain, summary) = simulate(cfg, registry)?;
    let dir = &cfg.output.dir;
    output::ensure_dir(dir)?;
    output::write_samples(&dir.join("samples.csv"), &chain)?;
    output::write_acf(&dir.join("acf.csv"), &summary.mixing, cfg.output.acf_lags)?;
    let coord = cfg.sampler.analyzed_coordinate;
    let values: Vec<f64> = chain.post_burn_in().iter().map(|s| s[coord]).collect();
    output::write_histogram(&dir.join("histogram.csv"), &values, cfg.output.hist_bins)?;
    output::write_metadata(dir, "chain", cfg, &summary)?;
    Ok(summary)
}
