use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::Potential;

/// Vertical gravity anomaly at surface position `x_s` of a unit point mass
/// buried at depth `h` below `x_f`: `h / ((x_s - x_f)^2 + h^2)^{3/2}`.
pub fn gravity_forward(h: f64, x_s: f64, x_f: f64) -> f64 {
    let r2 = (x_s - x_f).powi(2) + h * h;
    h / r2.powf(1.5)
}

/// Depth-inversion problem: noisy anomaly readings at fixed sensors with a
/// Gaussian prior on the depth. An infinite `prior_std` gives a flat prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GravityModel {
    pub x_f: f64,
    pub sensors: Vec<f64>,
    pub data: Vec<f64>,
    pub sigma: f64,
    pub prior_mean: f64,
    pub prior_std: f64,
}

impl GravityModel {
    pub fn new(x_f: f64, sensors: Vec<f64>, data: Vec<f64>, sigma: f64, prior_mean: f64, prior_std: f64) -> Result<Self> {
        let model = Self { x_f, sensors, data, sigma, prior_mean, prior_std };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sensors.is_empty() {
            return Err(Error::InvalidParameter("at least one sensor is required".into()));
        }
        if self.sensors.len() != self.data.len() {
            return Err(Error::DimensionMismatch { expected: self.sensors.len(), got: self.data.len() });
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("noise sigma must be positive, got {}", self.sigma)));
        }
        if self.prior_std.is_nan() || self.prior_std <= 0.0 {
            return Err(Error::InvalidParameter(format!("prior std must be positive, got {}", self.prior_std)));
        }
        let finite = [self.x_f, self.prior_mean].iter().chain(&self.sensors).chain(&self.data).all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("gravity model contains non-finite values".into()));
        }
        Ok(())
    }

    /// Synthetic data `d_i = g(h_true; s_i) + sigma * eps_i`.
    pub fn synthetic<R: Rng + ?Sized>(
        true_h: f64,
        x_f: f64,
        sensors: Vec<f64>,
        sigma: f64,
        prior_mean: f64,
        prior_std: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let data = sensors
            .iter()
            .map(|&s| {
                let eps: f64 = rng.sample(StandardNormal);
                gravity_forward(true_h, s, x_f) + sigma * eps
            })
            .collect();
        Self::new(x_f, sensors, data, sigma, prior_mean, prior_std)
    }

    pub fn predict(&self, h: f64) -> Vec<f64> {
        self.sensors.iter().map(|&s| gravity_forward(h, s, self.x_f)).collect()
    }

    /// Posterior potential, `+inf` for non-physical depths `h <= 0`.
    pub fn potential(&self, h: f64) -> f64 {
        gravity_potential(h, self)
    }

    /// Minimiser of the potential on `[lo, hi]`: dense grid scan refined by
    /// golden-section search in the bracketing cell.
    pub fn posterior_mode(&self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("invalid search interval [{lo}, {hi}]")));
        }
        const GRID: usize = 20_000;
        let step = (hi - lo) / GRID as f64;
        let mut best = (f64::INFINITY, lo);
        for i in 0..=GRID {
            let h = lo + step * i as f64;
            let u = self.potential(h);
            if u < best.0 {
                best = (u, h);
            }
        }
        if !best.0.is_finite() {
            return Err(Error::InvalidArgument("potential is not finite anywhere on the search interval".into()));
        }
        let (mut a, mut b) = ((best.1 - step).max(lo), (best.1 + step).min(hi));
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..100 {
            let c = b - ratio * (b - a);
            let d = a + ratio * (b - a);
            if self.potential(c) < self.potential(d) {
                b = d;
            } else {
                a = c;
            }
        }
        Ok(0.5 * (a + b))
    }
}

/// `sum_i (d_i - g(h; s_i))^2 / (2 sigma^2) + (h - mu)^2 / (2 sigma_pr^2)`.
pub fn gravity_potential(h: f64, model: &GravityModel) -> f64 {
    if !(h.is_finite() && h > 0.0) {
        return f64::INFINITY;
    }
    let s2 = model.sigma * model.sigma;
    let misfit: f64 = model
        .sensors
        .iter()
        .zip(&model.data)
        .map(|(&s, &d)| (d - gravity_forward(h, s, model.x_f)).powi(2))
        .sum::<f64>()
        / (2.0 * s2);
    let prior = if model.prior_std.is_finite() {
        (h - model.prior_mean).powi(2) / (2.0 * model.prior_std * model.prior_std)
    } else {
        0.0
    };
    misfit + prior
}

/// The gravity posterior as a one-dimensional sampling target.
#[derive(Debug, Clone)]
pub struct GravityPosterior {
    model: GravityModel,
}

impl GravityPosterior {
    pub fn new(model: GravityModel) -> Self {
        Self { model }
    }

    pub fn model(&self) -> &GravityModel {
        &self.model
    }
}

impl Potential for GravityPosterior {
    fn name(&self) -> &str {
        "gravity"
    }

    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &[f64]) -> f64 {
        gravity_potential(x[0], &self.model)
    }
}
