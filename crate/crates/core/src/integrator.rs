//! The q-leapfrog scheme: half kick, drift, half kick, with the log of the
//! q-Jacobian determinant accumulated per sub-map.
//!
//! Sub-maps and their q-Jacobian determinants:
//!
//! ```text
//! A(dt/2): p <- p - dt/2 F(x, p)      det(I - dt/2 [D_pj F_i])   at z0 and z1
//! B(dt):   x <- x + dt   v(x, p)      det(I + dt   [D_xj v_i])   at z1/2
//! ```
//!
//! For a separable Hamiltonian `F` depends on `x` only and `v` on `p` only, so
//! every Jackson partial in these blocks is exactly zero and each factor is 1.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcalc::{force_field, jackson_jacobian, velocity_field, DeformationParameter, HamiltonianSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if x.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), got: p.len() });
        }
        if x.is_empty() {
            return Err(Error::InvalidArgument("phase point must have dimension >= 1".into()));
        }
        Ok(Self { x, p })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.p).all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub steps: usize,
    pub dp: DeformationParameter,
    pub track_jacobian: bool,
}

impl IntegratorConfig {
    pub fn new(dt: f64, steps: usize, dp: DeformationParameter) -> Result<Self> {
        let cfg = Self { dt, steps, dp, track_jacobian: true };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be at least 1".into()));
        }
        self.dp.validate()
    }
}

/// Outcome of a single q-leapfrog step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub point: PhasePoint,
    pub log_jacobian: f64,
    pub diverged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub end: PhasePoint,
    pub log_jacobian: f64,
    /// `H` at the start and after every completed step.
    pub h_trace: Vec<f64>,
    pub diverged: bool,
}

/// Time reversal `(x, p) -> (x, -p)`.
pub fn flip_momentum(z: &PhasePoint) -> PhasePoint {
    PhasePoint { x: z.x.clone(), p: z.p.iter().map(|v| -v).collect() }
}

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// `log det(I + coeff * J)` with `J` the Jackson Jacobian of the vector field
/// `g` at `w`. `None` when the determinant is non-positive or non-finite.
fn log_det_factor<G>(g: G, w: &[f64], coeff: f64, dp: &DeformationParameter) -> Result<Option<f64>>
where
    G: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let d = w.len();
    let block = DMatrix::<f64>::identity(d, d) + jackson_jacobian(g, w, dp)? * coeff;
    let det = if d == 1 { block[(0, 0)] } else { block.determinant() };
    Ok((det.is_finite() && det > 0.0).then(|| det.ln()))
}

fn diverged_step(z: &PhasePoint) -> Step {
    Step { point: z.clone(), log_jacobian: f64::NAN, diverged: true }
}

/// One q-leapfrog step `A(dt/2) ∘ B(dt) ∘ A(dt/2)`.
///
/// Non-finite intermediates, evaluator failures and non-positive Jacobian
/// factors all yield a step flagged `diverged` instead of an error.
pub fn leapfrog_step(z: &PhasePoint, h: &HamiltonianSpec, cfg: &IntegratorConfig) -> Step {
    match try_leapfrog_step(z, h, cfg) {
        Ok(Some(step)) => step,
        Ok(None) | Err(_) => diverged_step(z),
    }
}

fn try_leapfrog_step(z: &PhasePoint, h: &HamiltonianSpec, cfg: &IntegratorConfig) -> Result<Option<Step>> {
    let dp = &cfg.dp;
    let half = 0.5 * cfg.dt;
    let mut log_j = 0.0;

    // A(dt/2) at z0
    if cfg.track_jacobian {
        let x0 = &z.x;
        let f = |pp: &[f64]| force_field(h, x0, pp, dp);
        match log_det_factor(f, &z.p, -half, dp)? {
            Some(v) => log_j += v,
            None => return Ok(None),
        }
    }
    let f0 = force_field(h, &z.x, &z.p, dp)?;
    let p_half: Vec<f64> = z.p.iter().zip(&f0).map(|(p, f)| p - half * f).collect();
    if !all_finite(&p_half) {
        return Ok(None);
    }

    // B(dt) at z1/2
    if cfg.track_jacobian {
        let v = |xx: &[f64]| velocity_field(h, xx, &p_half, dp);
        match log_det_factor(v, &z.x, cfg.dt, dp)? {
            Some(v) => log_j += v,
            None => return Ok(None),
        }
    }
    let vel = velocity_field(h, &z.x, &p_half, dp)?;
    let x1: Vec<f64> = z.x.iter().zip(&vel).map(|(x, v)| x + cfg.dt * v).collect();
    if !all_finite(&x1) {
        return Ok(None);
    }

    // A(dt/2) at z1 = (x1, p_half)
    if cfg.track_jacobian {
        let f = |pp: &[f64]| force_field(h, &x1, pp, dp);
        match log_det_factor(f, &p_half, -half, dp)? {
            Some(v) => log_j += v,
            None => return Ok(None),
        }
    }
    let f1 = force_field(h, &x1, &p_half, dp)?;
    let p1: Vec<f64> = p_half.iter().zip(&f1).map(|(p, f)| p - half * f).collect();
    if !all_finite(&p1) {
        return Ok(None);
    }

    Ok(Some(Step { point: PhasePoint { x: x1, p: p1 }, log_jacobian: log_j, diverged: false }))
}

/// Applies `cfg.steps` q-leapfrog steps from `z0`, stopping at the first
/// divergence.
pub fn integrate(z0: &PhasePoint, h: &HamiltonianSpec, cfg: &IntegratorConfig) -> TrajectoryResult {
    let mut z = z0.clone();
    let mut log_j = 0.0;
    let mut h_trace = Vec::with_capacity(cfg.steps + 1);
    let h0 = h.energy(&z.x, &z.p);
    h_trace.push(h0);
    if !h0.is_finite() {
        return TrajectoryResult { end: z, log_jacobian: log_j, h_trace, diverged: true };
    }
    for _ in 0..cfg.steps {
        let step = leapfrog_step(&z, h, cfg);
        if step.diverged {
            return TrajectoryResult { end: z, log_jacobian: log_j, h_trace, diverged: true };
        }
        z = step.point;
        log_j += step.log_jacobian;
        let e = h.energy(&z.x, &z.p);
        h_trace.push(e);
        if !e.is_finite() {
            return TrajectoryResult { end: z, log_jacobian: log_j, h_trace, diverged: true };
        }
    }
    TrajectoryResult { end: z, log_jacobian: log_j, h_trace, diverged: false }
}
