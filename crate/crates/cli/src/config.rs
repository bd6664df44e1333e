//! Experiment configuration.
//!
//! Configs are TOML files with the sections below; every section except
//! `[target]` is optional. A run's `metadata.json` embeds the fully resolved
//! config and is accepted wherever a TOML config is, which is how runs are
//! replayed.
//!
//! ```toml
//! [target]
//! name = "octic"              # registered potential, or "gravity" / "diffusion"
//! variance = 1.0              # only for "gaussian"
//!
//! [sampler]
//! q = 0.95                    # single-chain runs
//! q_values = [0.9, 0.95, 1.0] # sweeps; defaults to the 21-point table grid
//! dt = 0.1
//! steps = 10
//! n_samples = 10000
//! burn_in = 1000
//! seed = 1
//! x0 = [1.7]
//! mass = [1.0]
//! analyzed_coordinate = 0
//! track_jacobian = true
//!
//! [adapt]
//! target_accept = 0.5
//! adapt_steps = 1000
//! learning_rate = 0.05
//!
//! [qcalc]
//! classical_tol = 1e-12
//! zero_tol = 1e-8
//! fd_step = 1e-6
//! fallback = "central"        # or "forward"
//!
//! [output]
//! dir = "out"
//! hist_bins = 50
//! acf_lags = 200
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use qhmc_core::potentials::TargetParams;
use qhmc_core::qcalc::{DeformationParameter, FiniteDifference};
use qhmc_core::sampler::AdaptConfig;
use serde::{Deserialize, Serialize};

/// Malformed, missing or inconsistent configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl From<qhmc_core::Error> for ConfigError {
    fn from(e: qhmc_core::Error) -> Self {
        Self(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub target: TargetSection,
    #[serde(default)]
    pub sampler: SamplerSection,
    #[serde(default)]
    pub adapt: Option<AdaptConfig>,
    #[serde(default)]
    pub qcalc: QcalcSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub force_table: Option<ForceTableSection>,
    #[serde(default)]
    pub gravity: Option<GravitySection>,
    #[serde(default)]
    pub diffusion: Option<DiffusionSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
}

impl TargetSection {
    pub fn params(&self) -> TargetParams {
        TargetParams { variance: self.variance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerSection {
    pub q: f64,
    pub q_values: Option<Vec<f64>>,
    pub dt: f64,
    pub steps: usize,
    pub n_samples: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub x0: Option<Vec<f64>>,
    pub mass: Option<Vec<f64>>,
    pub analyzed_coordinate: usize,
    pub track_jacobian: bool,
}

impl Default for SamplerSection {
    fn default() -> Self {
        Self {
            q: 1.0,
            q_values: None,
            dt: 0.1,
            steps: 10,
            n_samples: 10_000,
            burn_in: 1_000,
            seed: 0,
            x0: None,
            mass: None,
            analyzed_coordinate: 0,
            track_jacobian: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QcalcSection {
    pub classical_tol: f64,
    pub zero_tol: f64,
    pub fd_step: f64,
    pub fallback: FiniteDifference,
}

impl Default for QcalcSection {
    fn default() -> Self {
        let d = DeformationParameter::default();
        Self { classical_tol: d.classical_tol, zero_tol: d.zero_tol, fd_step: d.fd_step, fallback: d.fallback }
    }
}

impl QcalcSection {
    pub fn deformation(&self, q: f64) -> Result<DeformationParameter, ConfigError> {
        let dp = DeformationParameter::new(q)?
            .with_tolerances(self.classical_tol, self.zero_tol, self.fd_step)?
            .with_fallback(self.fallback);
        Ok(dp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub hist_bins: usize,
    pub acf_lags: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), hist_bins: 50, acf_lags: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForceTableSection {
    pub x: f64,
    pub q_values: Vec<f64>,
}

impl Default for ForceTableSection {
    fn default() -> Self {
        Self { x: 1.7, q_values: vec![0.5, 0.9, 1.0, 1.1, 1.2] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GravitySection {
    pub true_depth: f64,
    pub x_f: f64,
    pub sensors: Vec<f64>,
    pub sigma: f64,
    pub prior_mean: f64,
    pub prior_std: f64,
    /// Observed anomalies; synthesised from `true_depth` when absent.
    pub data: Option<Vec<f64>>,
    pub data_seed: Option<u64>,
}

impl Default for GravitySection {
    fn default() -> Self {
        Self {
            true_depth: 0.2,
            x_f: 0.3,
            sensors: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            sigma: 0.1,
            prior_mean: 0.3,
            prior_std: 0.05,
            data: None,
            data_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiffusionSection {
    pub grid_n: usize,
    pub n_modes: usize,
    pub smoothness: f64,
    pub n_obs: usize,
    pub sigma: f64,
    /// Constant source term `f`.
    pub source: f64,
    /// True `log alpha` as `(amplitude, k)` pairs of `sin(k pi x)`.
    pub truth: Vec<(f64, f64)>,
    pub data_seed: Option<u64>,
    /// Synthetic-data JSON written by an earlier run; used instead of
    /// generating new data.
    pub data_file: Option<PathBuf>,
}

impl Default for DiffusionSection {
    fn default() -> Self {
        Self {
            grid_n: 80,
            n_modes: 9,
            smoothness: 1.0,
            n_obs: 70,
            sigma: 0.02,
            source: 1.0,
            truth: vec![(0.15, 2.0), (0.05, 4.0)],
            data_seed: None,
            data_file: None,
        }
    }
}

/// Tables' q grid: 20 uniform points on `[0, end]` plus `q = 1`.
pub fn default_q_grid(dim: usize) -> Vec<f64> {
    let end = if dim == 1 { 1.2 } else { 1.1 };
    let mut grid: Vec<f64> = (0..20).map(|i| end * i as f64 / 19.0).collect();
    grid.push(1.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

impl ExperimentConfig {
    /// Parses a TOML config, or the `config` member of a metadata JSON file.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::Error::new(e).context(format!("reading config {}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg = if is_json { Self::from_metadata_json(&text)? } else { Self::from_toml(&text)? };
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_metadata_json(text: &str) -> Result<Self, ConfigError> {
        #[derive(Deserialize)]
        struct Envelope {
            config: ExperimentConfig,
        }
        let env: Envelope = serde_json::from_str(text).map_err(|e| ConfigError(format!("metadata: {e}")))?;
        env.config.validate()?;
        Ok(env.config)
    }

    pub fn apply_overrides(&mut self, seed: Option<u64>, out: Option<PathBuf>) {
        if let Some(seed) = seed {
            self.sampler.seed = seed;
        }
        if let Some(out) = out {
            self.output.dir = out;
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.sampler;
        if self.target.name.trim().is_empty() {
            return Err(ConfigError("target.name must not be empty".into()));
        }
        if !(s.dt.is_finite() && s.dt > 0.0) {
            return Err(ConfigError(format!("sampler.dt must be positive, got {}", s.dt)));
        }
        if s.steps == 0 {
            return Err(ConfigError("sampler.steps must be at least 1".into()));
        }
        if s.n_samples == 0 || s.burn_in >= s.n_samples {
            return Err(ConfigError(format!(
                "sampler.burn_in ({}) must be smaller than sampler.n_samples ({})",
                s.burn_in, s.n_samples
            )));
        }
        let check_q = |q: f64| {
            if q.is_finite() && q >= 0.0 {
                Ok(())
            } else {
                Err(ConfigError(format!("q values must be finite and >= 0, got {q}")))
            }
        };
        check_q(s.q)?;
        if let Some(qs) = &s.q_values {
            if qs.is_empty() {
                return Err(ConfigError("sampler.q_values must not be empty".into()));
            }
            qs.iter().try_for_each(|&q| check_q(q))?;
        }
        if let Some(x0) = &s.x0 {
            if x0.is_empty() || x0.iter().any(|v| !v.is_finite()) {
                return Err(ConfigError("sampler.x0 must be a non-empty vector of finite values".into()));
            }
        }
        if let Some(a) = &self.adapt {
            a.validate()?;
        }
        self.qcalc.deformation(1.0)?;
        if self.output.hist_bins == 0 {
            return Err(ConfigError("output.hist_bins must be positive".into()));
        }
        Ok(())
    }
}
