//! Shared plumbing from a config to a sampler run.

use std::sync::Arc;

use qhmc_core::integrator::IntegratorConfig;
use qhmc_core::potentials::Potential;
use qhmc_core::qcalc::HamiltonianSpec;
use qhmc_core::sampler::SamplerConfig;

use crate::config::{ConfigError, ExperimentConfig};

pub fn hamiltonian(cfg: &ExperimentConfig, potential: Arc<dyn Potential>) -> Result<HamiltonianSpec, ConfigError> {
    let dim = potential.dim();
    match &cfg.sampler.mass {
        Some(m) if m.len() != dim => {
            Err(ConfigError(format!("sampler.mass has {} entries, target dimension is {dim}", m.len())))
        }
        Some(m) => Ok(HamiltonianSpec::new(potential, m.clone())?),
        None => Ok(HamiltonianSpec::unit_mass(potential)),
    }
}

pub fn sampler_config(cfg: &ExperimentConfig, q: f64, seed: u64) -> Result<SamplerConfig, ConfigError> {
    let s = &cfg.sampler;
    let integrator = IntegratorConfig {
        dt: s.dt,
        steps: s.steps,
        dp: cfg.qcalc.deformation(q)?,
        track_jacobian: s.track_jacobian,
    };
    let sc = SamplerConfig { integrator, n_samples: s.n_samples, burn_in: s.burn_in, seed, adapt: cfg.adapt };
    sc.validate()?;
    Ok(sc)
}

/// Configured start point, or the origin.
pub fn initial_state(cfg: &ExperimentConfig, dim: usize) -> Result<Vec<f64>, ConfigError> {
    match &cfg.sampler.x0 {
        Some(x0) if x0.len() != dim => {
            Err(ConfigError(format!("sampler.x0 has {} entries, target dimension is {dim}", x0.len())))
        }
        Some(x0) => Ok(x0.clone()),
        None => Ok(vec![0.0; dim]),
    }
}

pub fn check_coordinate(cfg: &ExperimentConfig, dim: usize) -> Result<usize, ConfigError> {
    let c = cfg.sampler.analyzed_coordinate;
    if c >= dim {
        return Err(ConfigError(format!("sampler.analyzed_coordinate {c} out of range for dimension {dim}")));
    }
    Ok(c)
}
