//! `-(alpha u')' = f` on `(0, 1)` with `u(0) = u(1) = 0`, discretised by
//! second-order finite differences on a uniform grid, together with its
//! discrete adjoint and the posterior over KL coefficients of `log alpha`.
//!
//! Fields are stored on all `n + 2` nodes, boundaries included, so that
//! `alpha` and the gradient field line up with the node coordinates.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::kl::KlBasis;
use super::tridiag::solve_tridiagonal;
use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::qcalc::DeformationParameter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    interior: usize,
}

impl Grid {
    pub fn new(interior: usize) -> Result<Self> {
        if interior < 2 {
            return Err(Error::InvalidParameter(format!("grid needs at least 2 interior nodes, got {interior}")));
        }
        Ok(Self { interior })
    }

    pub fn interior(&self) -> usize {
        self.interior
    }

    pub fn len(&self) -> usize {
        self.interior + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.interior + 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.len()).map(|i| i as f64 * h).collect()
    }

    /// Interior node closest to `x`.
    pub fn nearest_interior(&self, x: f64) -> usize {
        let i = (x / self.spacing()).round();
        (i.max(1.0) as usize).min(self.interior)
    }
}

/// Forward model, observations and prior basis for the diffusion inverse
/// problem.
#[derive(Debug, Clone)]
pub struct DiffusionModel {
    grid: Grid,
    source: Vec<f64>,
    obs_points: Vec<f64>,
    obs_nodes: Vec<usize>,
    data: Vec<f64>,
    sigma: f64,
    kl: KlBasis,
    modes: Vec<Vec<f64>>,
}

impl DiffusionModel {
    pub fn new(
        grid: Grid,
        source: impl Fn(f64) -> f64,
        obs_points: Vec<f64>,
        data: Vec<f64>,
        sigma: f64,
        kl: KlBasis,
    ) -> Result<Self> {
        if obs_points.is_empty() {
            return Err(Error::InvalidParameter("at least one observation is required".into()));
        }
        if obs_points.len() != data.len() {
            return Err(Error::DimensionMismatch { expected: obs_points.len(), got: data.len() });
        }
        if obs_points.iter().any(|x| !(*x > 0.0 && *x < 1.0)) {
            return Err(Error::InvalidParameter("observation points must lie in (0, 1)".into()));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("noise sigma must be positive, got {sigma}")));
        }
        let nodes = grid.nodes();
        let source: Vec<f64> = nodes.iter().map(|&x| source(x)).collect();
        if source.iter().chain(&data).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("source and data must be finite".into()));
        }
        let obs_nodes = obs_points.iter().map(|&x| grid.nearest_interior(x)).collect();
        let modes = kl.scaled_modes(&nodes);
        Ok(Self { grid, source, obs_points, obs_nodes, data, sigma, kl, modes })
    }

    /// Noisy synthetic observations of the solution for the coefficient
    /// `truth`. Returns the model and the noise-free solution on the grid.
    #[allow(clippy::too_many_arguments)]
    pub fn synthetic<R: Rng + ?Sized>(
        grid: Grid,
        source: impl Fn(f64) -> f64,
        obs_points: Vec<f64>,
        sigma: f64,
        kl: KlBasis,
        truth: impl Fn(f64) -> f64,
        rng: &mut R,
    ) -> Result<(Self, Vec<f64>)> {
        let placeholder = vec![0.0; obs_points.len()];
        let mut model = Self::new(grid, source, obs_points, placeholder, sigma, kl)?;
        let alpha: Vec<f64> = grid.nodes().iter().map(|&x| truth(x)).collect();
        let u = diffusion_solve(&alpha, &model)?;
        model.data = model
            .observe(&u)
            .into_iter()
            .map(|v| {
                let eps: f64 = rng.sample(StandardNormal);
                v + sigma * eps
            })
            .collect();
        Ok((model, u))
    }

    /// `m` points `j / (m + 1)`, `j = 1..=m`.
    pub fn equispaced_observations(m: usize) -> Vec<f64> {
        (1..=m).map(|j| j as f64 / (m + 1) as f64).collect()
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn obs_points(&self) -> &[f64] {
        &self.obs_points
    }

    pub fn obs_nodes(&self) -> &[usize] {
        &self.obs_nodes
    }

    pub fn kl(&self) -> &KlBasis {
        &self.kl
    }

    pub fn n_params(&self) -> usize {
        self.kl.n_modes()
    }

    /// `sigma^2 h`, the factor converting a nodal misfit sensitivity into the
    /// gradient density returned by [`functional_gradient_field`].
    pub fn sensitivity_weight(&self) -> f64 {
        self.sigma * self.sigma * self.grid.spacing()
    }

    pub fn observe(&self, u: &[f64]) -> Vec<f64> {
        self.obs_nodes.iter().map(|&i| u[i]).collect()
    }

    /// `J(u) = 1/2 sum_j (u(x_j) - d_j)^2`.
    pub fn misfit(&self, u: &[f64]) -> f64 {
        0.5 * self.obs_nodes.iter().zip(&self.data).map(|(&i, d)| (u[i] - d).powi(2)).sum::<f64>()
    }

    /// Coefficient field on the nodes for whitened KL coefficients `theta`.
    pub fn expand(&self, theta: &[f64]) -> Result<Vec<f64>> {
        if theta.len() != self.n_params() {
            return Err(Error::DimensionMismatch { expected: self.n_params(), got: theta.len() });
        }
        Ok((0..self.grid.len())
            .map(|i| theta.iter().zip(&self.modes).map(|(t, m)| t * m[i]).sum::<f64>().exp())
            .collect())
    }
}

fn check_alpha(alpha: &[f64], grid: Grid) -> Result<()> {
    if alpha.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), got: alpha.len() });
    }
    if alpha.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::NonFinite { input: alpha.to_vec() });
    }
    Ok(())
}

/// Solves `A(alpha) w = rhs` on the interior nodes, with half-node
/// coefficients `(alpha_i + alpha_{i+1}) / 2`.
fn solve_operator(alpha: &[f64], grid: Grid, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = grid.interior();
    let h2 = grid.spacing().powi(2);
    let half: Vec<f64> = alpha.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let diag: Vec<f64> = (1..=n).map(|i| (half[i - 1] + half[i]) / h2).collect();
    let off: Vec<f64> = (1..n).map(|i| -half[i] / h2).collect();
    let inner = solve_tridiagonal(&off, &diag, &off, &rhs[1..=n])?;
    let mut w = Vec::with_capacity(grid.len());
    w.push(0.0);
    w.extend(inner);
    w.push(0.0);
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { input: alpha.to_vec() });
    }
    Ok(w)
}

/// Discrete forward solution on all nodes.
pub fn diffusion_solve(alpha: &[f64], model: &DiffusionModel) -> Result<Vec<f64>> {
    check_alpha(alpha, model.grid)?;
    solve_operator(alpha, model.grid, &model.source)
}

/// Adjoint state: the same operator with point sources
/// `(u(x_j) - d_j) / (sigma^2 h)` at the observation nodes.
pub fn adjoint_solve(alpha: &[f64], u: &[f64], model: &DiffusionModel) -> Result<Vec<f64>> {
    check_alpha(alpha, model.grid)?;
    if u.len() != model.grid.len() {
        return Err(Error::DimensionMismatch { expected: model.grid.len(), got: u.len() });
    }
    let scale = 1.0 / model.sensitivity_weight();
    let mut rhs = vec![0.0; model.grid.len()];
    for (&i, d) in model.obs_nodes.iter().zip(&model.data) {
        rhs[i] += (u[i] - d) * scale;
    }
    solve_operator(alpha, model.grid, &rhs)
}

/// Gradient density `G_k = -u' lambda'` at each node, with the product of
/// cell gradients averaged over the (one or two) cells touching node `k`.
/// The derivative of the posterior misfit with respect to `alpha_k` is
/// `h G_k`.
pub fn functional_gradient_field(u: &[f64], lambda: &[f64], h: f64) -> Vec<f64> {
    let cells: Vec<f64> = u
        .windows(2)
        .zip(lambda.windows(2))
        .map(|(du, dl)| (du[1] - du[0]) * (dl[1] - dl[0]) / (h * h))
        .collect();
    (0..u.len())
        .map(|k| {
            let left = if k > 0 { cells[k - 1] } else { 0.0 };
            let right = cells.get(k).copied().unwrap_or(0.0);
            -0.5 * (left + right)
        })
        .collect()
}

/// Jackson difference quotient of the misfit in the nodal value `alpha_y`:
/// `(J(alpha with alpha_y -> q^2 alpha_y) - J(alpha)) / ((q^2 - 1) alpha_y)`.
/// Divided by [`DiffusionModel::sensitivity_weight`] it approximates the
/// adjoint gradient density at node `y`.
pub fn direct_jackson_perturbation(alpha: &[f64], node: usize, q: f64, model: &DiffusionModel) -> Result<f64> {
    DeformationParameter::new(q)?;
    if node >= model.grid.len() {
        return Err(Error::InvalidArgument(format!("node {node} outside grid of {} nodes", model.grid.len())));
    }
    let q2 = q * q;
    if q2 == 1.0 {
        return Err(Error::InvalidParameter("q must differ from 1 for a direct perturbation".into()));
    }
    let base = model.misfit(&diffusion_solve(alpha, model)?);
    let mut perturbed = alpha.to_vec();
    perturbed[node] *= q2;
    let moved = model.misfit(&diffusion_solve(&perturbed, model)?);
    Ok((moved - base) / ((q2 - 1.0) * alpha[node]))
}

/// Negative log posterior `J(u(theta)) / sigma^2 + |theta|^2 / 2` and its
/// gradient in `theta`, from one forward and one adjoint solve.
pub fn diffusion_posterior_potential(theta: &[f64], model: &DiffusionModel) -> Result<(f64, Vec<f64>)> {
    let alpha = model.expand(theta)?;
    let u = diffusion_solve(&alpha, model)?;
    let lambda = adjoint_solve(&alpha, &u, model)?;
    let h = model.grid.spacing();
    let g = functional_gradient_field(&u, &lambda, h);
    let s2 = model.sigma * model.sigma;
    let value = model.misfit(&u) / s2 + 0.5 * theta.iter().map(|t| t * t).sum::<f64>();
    let grad = theta
        .iter()
        .zip(&model.modes)
        .map(|(t, m)| t + h * g.iter().zip(&alpha).zip(m).map(|((gi, ai), mi)| gi * ai * mi).sum::<f64>())
        .collect();
    Ok((value, grad))
}

/// The diffusion posterior as a sampling target. The q-gradient is the
/// adjoint gradient: the Jackson derivative of a smooth functional agrees
/// with its ordinary derivative to first order in `q - 1`.
#[derive(Debug, Clone)]
pub struct DiffusionPosterior {
    model: DiffusionModel,
}

impl DiffusionPosterior {
    pub fn new(model: DiffusionModel) -> Self {
        Self { model }
    }

    pub fn model(&self) -> &DiffusionModel {
        &self.model
    }
}

impl Potential for DiffusionPosterior {
    fn name(&self) -> &str {
        "diffusion"
    }

    fn dim(&self) -> usize {
        self.model.n_params()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let Ok(alpha) = self.model.expand(x) else { return f64::NAN };
        match diffusion_solve(&alpha, &self.model) {
            Ok(u) => {
                self.model.misfit(&u) / (self.model.sigma * self.model.sigma)
                    + 0.5 * x.iter().map(|t| t * t).sum::<f64>()
            }
            Err(_) => f64::INFINITY,
        }
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        diffusion_posterior_potential(x, &self.model).ok().map(|(_, g)| g)
    }

    fn q_gradient(&self, x: &[f64], _dp: &DeformationParameter) -> Result<Vec<f64>> {
        diffusion_posterior_potential(x, &self.model).map(|(_, g)| g)
    }
}
