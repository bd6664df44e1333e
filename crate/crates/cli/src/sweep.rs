//! q-sweeps: one independent chain per q value with mixing diagnostics.

use std::path::{Path, PathBuf};

use anyhow::Result;
use qhmc_core::diagnostics::{summarize, MixingReport};
use qhmc_core::potentials::PotentialRegistry;
use qhmc_core::sampler::{run_chain, ChainOutput};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{default_q_grid, ConfigError, ExperimentConfig};
use crate::output::{self, num, opt_num};
use crate::runner;

pub const SWEEP_HEADER: [&str; 6] = ["q", "time_s", "accept_rate", "ess", "iat", "ess_per_time"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub index: usize,
    pub q: f64,
    pub seed: u64,
    pub chain: ChainOutput,
    pub report: MixingReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub q: f64,
    pub seed: u64,
    pub time_s: f64,
    pub accept_rate: f64,
    pub divergence_rate: f64,
    pub ess: Option<f64>,
    pub iat: Option<f64>,
    pub ess_per_time: Option<f64>,
    pub degenerate: bool,
}

impl SweepRow {
    fn from_point(p: &SweepPoint) -> Self {
        let r = &p.report;
        Self {
            q: p.q,
            seed: p.seed,
            time_s: p.chain.wall_time,
            accept_rate: r.accept_rate,
            divergence_rate: r.divergence_rate,
            ess: r.ess,
            iat: r.iat,
            ess_per_time: r.ess_per_second,
            degenerate: r.is_degenerate(),
        }
    }

    /// `nan` for undefined ESS entries and `N/A` for an undefined IAT.
    pub fn record(&self) -> Vec<String> {
        vec![
            num(self.q),
            num(self.time_s),
            num(self.accept_rate),
            opt_num(self.ess),
            self.iat.map_or_else(|| "N/A".into(), num),
            opt_num(self.ess_per_time),
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub rows: Vec<SweepRow>,
    pub best_q: Option<f64>,
    pub csv: PathBuf,
}

pub fn q_grid(cfg: &ExperimentConfig, dim: usize) -> Vec<f64> {
    cfg.sampler.q_values.clone().unwrap_or_else(|| default_q_grid(dim))
}

/// Runs every chain of the sweep. Chain `i` is seeded with `seed ^ i`, so
/// results do not depend on the execution mode.
pub fn sweep_points(cfg: &ExperimentConfig, registry: &PotentialRegistry, exec: Execution) -> Result<Vec<SweepPoint>> {
    let potential = registry.build(&cfg.target.name, &cfg.target.params()).map_err(ConfigError::from)?;
    let dim = potential.dim();
    let h = runner::hamiltonian(cfg, potential)?;
    let x0 = runner::initial_state(cfg, dim)?;
    let coord = runner::check_coordinate(cfg, dim)?;
    let jobs: Vec<(usize, f64, u64)> =
        q_grid(cfg, dim).into_iter().enumerate().map(|(i, q)| (i, q, cfg.sampler.seed ^ i as u64)).collect();
    let setups = jobs
        .iter()
        .map(|&(i, q, seed)| Ok((i, q, seed, runner::sampler_config(cfg, q, seed)?)))
        .collect::<Result<Vec<_>, ConfigError>>()?;

    let run = |(i, q, seed, sc): &(usize, f64, u64, qhmc_core::sampler::SamplerConfig)| -> Result<SweepPoint> {
        let chain = run_chain(&x0, &h, sc)?;
        let report = summarize(&chain, sc.burn_in, chain.wall_time, coord)?;
        Ok(SweepPoint { index: *i, q: *q, seed: *seed, chain, report })
    };
    match exec {
        Execution::Sequential => setups.iter().map(run).collect(),
        Execution::Parallel => setups.par_iter().map(run).collect(),
    }
}

fn series_name(dir: &Path, index: usize, kind: &str) -> PathBuf {
    dir.join(format!("q{index:02}_{kind}.csv"))
}

/// Sweep with all outputs: `sweep.csv`, per-q trace, ACF and histogram
/// series, and `metadata.json`.
pub fn run_sweep(cfg: &ExperimentConfig, registry: &PotentialRegistry) -> Result<SweepSummary> {
    let points = sweep_points(cfg, registry, Execution::Parallel)?;
    let dir = &cfg.output.dir;
    output::ensure_dir(dir)?;
    let coord = cfg.sampler.analyzed_coordinate;
    for p in &points {
        output::write_samples(&series_name(dir, p.index, "trace"), &p.chain)?;
        output::write_acf(&series_name(dir, p.index, "acf"), &p.report, cfg.output.acf_lags)?;
        let values: Vec<f64> = p.chain.post_burn_in().iter().map(|s| s[coord]).collect();
        output::write_histogram(&series_name(dir, p.index, "hist"), &values, cfg.output.hist_bins)?;
    }
    let rows: Vec<SweepRow> = points.iter().map(SweepRow::from_point).collect();
    let csv = dir.join("sweep.csv");
    output::write_csv(&csv, &SWEEP_HEADER, rows.iter().map(SweepRow::record))?;
    let best_q = rows
        .iter()
        .filter(|r| !r.degenerate)
        .filter_map(|r| r.ess_per_time.map(|e| (r.q, e)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(q, _)| q);
    let summary = SweepSummary { rows, best_q, csv };
    output::write_metadata(dir, "sweep", cfg, &summary)?;
    Ok(summary)
}
