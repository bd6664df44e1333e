//! Inverse-problem pipelines, registered by name.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use qhmc_core::diagnostics::summarize;
use qhmc_core::inverse::{
    diffusion_solve, DiffusionModel, DiffusionPosterior, GravityModel, GravityPosterior, Grid, KlBasis,
};
use qhmc_core::potentials::Potential;
use qhmc_core::sampler::{run_chain, ChainOutput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chain::posterior_moments;
use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{self, num};
use crate::runner;

/// A posterior ready to sample, plus its problem-specific reporting.
pub trait PreparedProblem {
    fn potential(&self) -> Arc<dyn Potential>;

    /// Start used when the config gives no `x0`.
    fn default_start(&self) -> Vec<f64>;

    /// Writes problem-specific CSV series and returns scalar results.
    fn report(&self, chain: &ChainOutput, dir: &Path, cfg: &ExperimentConfig) -> Result<Value>;
}

pub trait InverseProblem: Send + Sync {
    fn name(&self) -> &'static str;

    fn prepare(&self, cfg: &ExperimentConfig) -> Result<Box<dyn PreparedProblem>>;
}

#[derive(Default)]
pub struct InverseRegistry {
    problems: BTreeMap<String, Box<dyn InverseProblem>>,
}

impl InverseRegistry {
    pub fn builtin() -> Self {
        let mut r = Self::default();
        r.register(Box::new(Gravity));
        r.register(Box::new(Diffusion));
        r
    }

    pub fn register(&mut self, problem: Box<dyn InverseProblem>) {
        self.problems.insert(problem.name().to_string(), problem);
    }

    pub fn names(&self) -> Vec<String> {
        self.problems.keys().cloned().collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn InverseProblem, ConfigError> {
        self.problems.get(name).map(|p| p.as_ref()).ok_or_else(|| {
            ConfigError(format!("unknown inverse problem '{name}'; known problems: {}", self.names().join(", ")))
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseOutcome {
    pub problem: String,
    pub q: f64,
    pub seed: u64,
    pub accept_rate: f64,
    pub divergence_rate: f64,
    pub final_dt: f64,
    pub wall_time: f64,
    pub start: Vec<f64>,
    pub posterior_mean: Vec<f64>,
    pub posterior_std: Vec<f64>,
    pub ess: Option<f64>,
    pub details: Value,
}

pub fn simulate(cfg: &ExperimentConfig, registry: &InverseRegistry) -> Result<(ChainOutput, Box<dyn PreparedProblem>, Vec<f64>)> {
    let problem = registry.get(&cfg.target.name)?;
    let prepared = problem.prepare(cfg)?;
    let potential = prepared.potential();
    let dim = potential.dim();
    let h = runner::hamiltonian(cfg, potential)?;
    let x0 = match &cfg.sampler.x0 {
        Some(_) => runner::initial_state(cfg, dim)?,
        None => prepared.default_start(),
    };
    let sc = runner::sampler_config(cfg, cfg.sampler.q, cfg.sampler.seed)?;
    let chain = run_chain(&x0, &h, &sc)?;
    Ok((chain, prepared, x0))
}

/// Samples the named posterior and writes `samples.csv`,
/// `potential_trace.csv`, `summary.csv`, problem series and `metadata.json`.
pub fn run_inverse(cfg: &ExperimentConfig, registry: &InverseRegistry) -> Result<InverseOutcome> {
    let (chain, prepared, start) = simulate(cfg, registry)?;
    let dir = &cfg.output.dir;
    output::ensure_dir(dir)?;
    output::write_samples(&dir.join("samples.csv"), &chain)?;
    output::write_csv(
        &dir.join("potential_trace.csv"),
        &["iteration", "potential"],
        chain.potential_trace.iter().enumerate().map(|(k, u)| vec![k.to_string(), num(*u)]),
    )?;
    let details = prepared.report(&chain, dir, cfg)?;
    let coord = runner::check_coordinate(cfg, chain.dim)?;
    let mixing = summarize(&chain, cfg.sampler.burn_in, chain.wall_time, coord)?;
    let (posterior_mean, posterior_std) = posterior_moments(chain.post_burn_in());
    let outcome = InverseOutcome {
        problem: cfg.target.name.clone(),
        q: cfg.sampler.q,
        seed: cfg.sampler.seed,
        accept_rate: chain.accept_rate(),
        divergence_rate: chain.divergence_rate(),
        final_dt: chain.final_dt,
        wall_time: chain.wall_time,
        start,
        posterior_mean,
        posterior_std,
        ess: mixing.ess,
        details,
    };
    let mut scalars = vec![
        ("accept_rate".to_string(), outcome.accept_rate),
        ("divergence_rate".to_string(), outcome.divergence_rate),
        ("final_dt".to_string(), outcome.final_dt),
        ("wall_time".to_string(), outcome.wall_time),
        ("ess".to_string(), outcome.ess.unwrap_or(f64::NAN)),
    ];
    if let Value::Object(map) = &outcome.details {
        scalars.extend(map.iter().filter_map(|(k, v)| v.as_f64().map(|f| (k.clone(), f))));
    }
    output::write_csv(&dir.join("summary.csv"), &["metric", "value"], scalars.into_iter().map(|(k, v)| vec![k, num(v)]))?;
    output::write_metadata(dir, "inverse", cfg, &outcome)?;
    Ok(outcome)
}

struct Gravity;

struct PreparedGravity {
    model: GravityModel,
    mode: f64,
    true_depth: f64,
}

impl InverseProblem for Gravity {
    fn name(&self) -> &'static str {
        "gravity"
    }

    fn prepare(&self, cfg: &ExperimentConfig) -> Result<Box<dyn PreparedProblem>> {
        let s = cfg.gravity.clone().unwrap_or_default();
        let model = match &s.data {
            Some(data) => GravityModel::new(s.x_f, s.sensors.clone(), data.clone(), s.sigma, s.prior_mean, s.prior_std),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(s.data_seed.unwrap_or(cfg.sampler.seed));
                GravityModel::synthetic(s.true_depth, s.x_f, s.sensors.clone(), s.sigma, s.prior_mean, s.prior_std, &mut rng)
            }
        }
        .map_err(ConfigError::from)?;
        let mode = model.posterior_mode(1e-4, 2.0)?;
        Ok(Box::new(PreparedGravity { model, mode, true_depth: s.true_depth }))
    }
}

impl PreparedProblem for PreparedGravity {
    fn potential(&self) -> Arc<dyn Potential> {
        Arc::new(GravityPosterior::new(self.model.clone()))
    }

    fn default_start(&self) -> Vec<f64> {
        vec![self.mode]
    }

    fn report(&self, chain: &ChainOutput, dir: &Path, cfg: &ExperimentConfig) -> Result<Value> {
        let depths: Vec<f64> = chain.post_burn_in().iter().map(|s| s[0]).collect();
        output::write_histogram(&dir.join("histogram.csv"), &depths, cfg.output.hist_bins)?;
        let at_mode = self.model.predict(self.mode);
        let at_truth = self.model.predict(self.true_depth);
        output::write_csv(
            &dir.join("data.csv"),
            &["sensor", "observed", "predicted_at_mode", "predicted_at_truth"],
            (0..self.model.sensors.len()).map(|i| {
                vec![num(self.model.sensors[i]), num(self.model.data[i]), num(at_mode[i]), num(at_truth[i])]
            }),
        )?;
        Ok(json!({
            "posterior_mode": self.mode,
            "true_depth": self.true_depth,
            "data": self.model.data,
        }))
    }
}

/// Synthetic diffusion data as written to and read from `synthetic_data.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionData {
    pub grid_n: usize,
    pub obs_points: Vec<f64>,
    pub data: Vec<f64>,
    pub sigma: f64,
    pub truth_alpha: Option<Vec<f64>>,
    pub truth_u: Option<Vec<f64>>,
}

struct Diffusion;

struct PreparedDiffusion {
    model: DiffusionModel,
    data: DiffusionData,
}

impl InverseProblem for Diffusion {
    fn name(&self) -> &'static str {
        "diffusion"
    }

    fn prepare(&self, cfg: &ExperimentConfig) -> Result<Box<dyn PreparedProblem>> {
        let s = cfg.diffusion.clone().unwrap_or_default();
        let kl = KlBasis::new(s.n_modes, s.smoothness).map_err(ConfigError::from)?;
        let source = s.source;
        let (model, data) = match &s.data_file {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let data: DiffusionData =
                    serde_json::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
                let grid = Grid::new(data.grid_n).map_err(ConfigError::from)?;
                let model =
                    DiffusionModel::new(grid, |_| source, data.obs_points.clone(), data.data.clone(), data.sigma, kl)
                        .map_err(ConfigError::from)?;
                (model, data)
            }
            None => {
                let grid = Grid::new(s.grid_n).map_err(ConfigError::from)?;
                let truth_terms = s.truth.clone();
                let truth = move |x: f64| truth_terms.iter().map(|(a, k)| a * (k * PI * x).sin()).sum::<f64>().exp();
                let mut rng = ChaCha8Rng::seed_from_u64(s.data_seed.unwrap_or(cfg.sampler.seed));
                let obs = DiffusionModel::equispaced_observations(s.n_obs);
                let (model, truth_u) = DiffusionModel::synthetic(grid, |_| source, obs, s.sigma, kl, &truth, &mut rng)
                    .map_err(ConfigError::from)?;
                let truth_alpha = grid.nodes().iter().map(|&x| truth(x)).collect();
                let data = DiffusionData {
                    grid_n: s.grid_n,
                    obs_points: model.obs_points().to_vec(),
                    data: model.data().to_vec(),
                    sigma: s.sigma,
                    truth_alpha: Some(truth_alpha),
                    truth_u: Some(truth_u),
                };
                (model, data)
            }
        };
        Ok(Box::new(PreparedDiffusion { model, data }))
    }
}

pub fn rmse(a: &[f64], b: &[f64]) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
}

pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

impl PreparedProblem for PreparedDiffusion {
    fn potential(&self) -> Arc<dyn Potential> {
        Arc::new(DiffusionPosterior::new(self.model.clone()))
    }

    fn default_start(&self) -> Vec<f64> {
        vec![0.0; self.model.n_params()]
    }

    fn report(&self, chain: &ChainOutput, dir: &Path, _cfg: &ExperimentConfig) -> Result<Value> {
        output::write_json(&dir.join("synthetic_data.json"), &self.data)?;
        let nodes = self.model.grid().nodes();
        let post = chain.post_burn_in();
        let fields = post.iter().map(|theta| self.model.expand(theta)).collect::<Result<Vec<_>, _>>()?;
        let n = fields.len() as f64;
        let mean: Vec<f64> = (0..nodes.len()).map(|i| fields.iter().map(|f| f[i]).sum::<f64>() / n).collect();
        let std: Vec<f64> = (0..nodes.len())
            .map(|i| (fields.iter().map(|f| (f[i] - mean[i]).powi(2)).sum::<f64>() / (n - 1.0).max(1.0)).sqrt())
            .collect();
        let u_mean = diffusion_solve(&mean, &self.model)?;
        let truth = self.data.truth_alpha.as_ref().filter(|t| t.len() == nodes.len());
        output::write_csv(
            &dir.join("reconstruction.csv"),
            &["x", "truth_alpha", "posterior_mean_alpha", "posterior_std_alpha", "u_at_mean"],
            (0..nodes.len()).map(|i| {
                vec![
                    num(nodes[i]),
                    num(truth.map_or(f64::NAN, |t| t[i])),
                    num(mean[i]),
                    num(std[i]),
                    num(u_mean[i]),
                ]
            }),
        )?;
        output::write_csv(
            &dir.join("data.csv"),
            &["x", "observed"],
            self.data.obs_points.iter().zip(&self.data.data).map(|(x, d)| vec![num(*x), num(*d)]),
        )?;
        let mut details = json!({ "n_params": self.model.n_params() });
        if let Some(t) = truth {
            details["rmse"] = json!(rmse(&mean, t));
            details["correlation"] = json!(correlation(&mean, t));
        }
        Ok(details)
    }
}
