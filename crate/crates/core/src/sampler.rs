//! q-HMC transitions: Gaussian momentum refresh, a q-leapfrog proposal and a
//! Metropolis test weighted by the q-Jacobian.
//!
//! Each chain owns one seeded ChaCha stream. Per iteration the stream yields,
//! in order, `d` standard normals for the momentum and then one uniform for
//! the accept test; the uniform is drawn even when the proposal diverged.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{integrate, IntegratorConfig, PhasePoint};
use crate::qcalc::HamiltonianSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptConfig {
    pub target_accept: f64,
    pub adapt_steps: usize,
    pub learning_rate: f64,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self { target_accept: 0.5, adapt_steps: 1000, learning_rate: 0.05 }
    }
}

impl AdaptConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "target_accept must lie in (0, 1), got {}",
                self.target_accept
            )));
        }
        if self.adapt_steps == 0 {
            return Err(Error::InvalidParameter("adapt_steps must be positive".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidParameter("learning_rate must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub integrator: IntegratorConfig,
    pub n_samples: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub adapt: Option<AdaptConfig>,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        self.integrator.validate()?;
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be positive".into()));
        }
        if self.burn_in >= self.n_samples {
            return Err(Error::InvalidParameter(format!(
                "burn_in ({}) must be smaller than n_samples ({})",
                self.burn_in, self.n_samples
            )));
        }
        if let Some(a) = &self.adapt {
            a.validate()?;
        }
        Ok(())
    }
}

/// Everything recorded by [`run_chain`]. Row `k` of `samples` is the state
/// after iteration `k`; the first `burn_in` rows are kept but excluded from
/// diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainOutput {
    pub dim: usize,
    pub samples: Vec<Vec<f64>>,
    pub accepted: Vec<bool>,
    pub diverged: Vec<bool>,
    pub h_init_trace: Vec<f64>,
    pub h_final_trace: Vec<f64>,
    pub log_jacobian_trace: Vec<f64>,
    pub potential_trace: Vec<f64>,
    pub burn_in: usize,
    pub wall_time: f64,
    pub final_dt: f64,
}

impl ChainOutput {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        self.samples.iter().map(|row| row[i]).collect()
    }

    pub fn accept_rate(&self) -> f64 {
        if self.accepted.is_empty() {
            return 0.0;
        }
        self.accepted.iter().filter(|a| **a).count() as f64 / self.accepted.len() as f64
    }

    pub fn divergence_rate(&self) -> f64 {
        if self.diverged.is_empty() {
            return 0.0;
        }
        self.diverged.iter().filter(|a| **a).count() as f64 / self.diverged.len() as f64
    }

    pub fn post_burn_in(&self) -> &[Vec<f64>] {
        &self.samples[self.burn_in.min(self.samples.len())..]
    }
}

/// Result of one q-HMC transition.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub x_next: Vec<f64>,
    pub accepted: bool,
    pub h_init: f64,
    pub h_final: f64,
    pub log_jacobian: f64,
    pub diverged: bool,
}

/// Draws `p_i ~ N(0, m_i)`.
pub fn sample_momentum<R: Rng + ?Sized>(x: &[f64], h: &HamiltonianSpec, rng: &mut R) -> Result<Vec<f64>> {
    if !h.is_separable() {
        return Err(Error::UnsupportedKinetic);
    }
    if x.len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: x.len() });
    }
    Ok(h.mass()
        .iter()
        .map(|m| {
            let z: f64 = rng.sample(StandardNormal);
            m.sqrt() * z
        })
        .collect())
}

/// `min(1, exp(log_jacobian + h_init - h_final))`, zero for a non-finite
/// final energy or Jacobian.
pub fn accept_probability(h_init: f64, h_final: f64, log_jacobian: f64) -> f64 {
    if !h_final.is_finite() || !log_jacobian.is_finite() {
        return 0.0;
    }
    let log_ratio = log_jacobian + h_init - h_final;
    if log_ratio >= 0.0 {
        1.0
    } else {
        log_ratio.exp()
    }
}

/// One q-HMC transition from `x_curr`.
pub fn hmc_step<R: Rng + ?Sized>(
    x_curr: &[f64],
    h: &HamiltonianSpec,
    cfg: &IntegratorConfig,
    rng: &mut R,
) -> Result<Transition> {
    let p = sample_momentum(x_curr, h, rng)?;
    let z0 = PhasePoint::new(x_curr.to_vec(), p)?;
    let h_init = h.energy(&z0.x, &z0.p);
    let traj = integrate(&z0, h, cfg);
    let h_final = if traj.diverged { f64::INFINITY } else { h.energy(&traj.end.x, &traj.end.p) };
    let alpha = if traj.diverged { 0.0 } else { accept_probability(h_init, h_final, traj.log_jacobian) };
    let u: f64 = rng.random();
    let accepted = u < alpha;
    Ok(Transition {
        x_next: if accepted { traj.end.x } else { x_curr.to_vec() },
        accepted,
        h_init,
        h_final,
        log_jacobian: traj.log_jacobian,
        diverged: traj.diverged,
    })
}

/// Step-size adaptation on `log dt`:
/// `log dt += rate / k^0.6 * (accepted - target)` for iterations `k = 1..=adapt_steps`.
fn adapt_step_size(dt: f64, iteration: usize, accepted: bool, adapt: &AdaptConfig) -> f64 {
    let indicator = if accepted { 1.0 } else { 0.0 };
    let gain = adapt.learning_rate / (iteration as f64).powf(0.6);
    (dt.ln() + gain * (indicator - adapt.target_accept)).exp()
}

/// Runs `n_samples` q-HMC iterations from `x0`.
pub fn run_chain(x0: &[f64], h: &HamiltonianSpec, cfg: &SamplerConfig) -> Result<ChainOutput> {
    cfg.validate()?;
    if x0.len() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: x0.len() });
    }
    if !x0.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("initial position must be finite".into()));
    }
    let n = cfg.n_samples;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut integrator = cfg.integrator;
    let mut out = ChainOutput {
        dim: h.dim(),
        samples: Vec::with_capacity(n),
        accepted: Vec::with_capacity(n),
        diverged: Vec::with_capacity(n),
        h_init_trace: Vec::with_capacity(n),
        h_final_trace: Vec::with_capacity(n),
        log_jacobian_trace: Vec::with_capacity(n),
        potential_trace: Vec::with_capacity(n),
        burn_in: cfg.burn_in,
        wall_time: 0.0,
        final_dt: integrator.dt,
    };

    let start = Instant::now();
    let mut x = x0.to_vec();
    for k in 0..n {
        let t = hmc_step(&x, h, &integrator, &mut rng)?;
        if let Some(adapt) = &cfg.adapt {
            if k < adapt.adapt_steps {
                integrator.dt = adapt_step_size(integrator.dt, k + 1, t.accepted, adapt);
            }
        }
        x = t.x_next;
        out.potential_trace.push(h.potential_energy(&x));
        out.samples.push(x.clone());
        out.accepted.push(t.accepted);
        out.diverged.push(t.diverged);
        out.h_init_trace.push(t.h_init);
        out.h_final_trace.push(t.h_final);
        out.log_jacobian_trace.push(t.log_jacobian);
    }
    out.wall_time = start.elapsed().as_secs_f64();
    out.final_dt = integrator.dt;
    Ok(out)
}
