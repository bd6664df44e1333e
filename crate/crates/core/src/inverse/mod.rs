//! Bayesian inverse problems sampled with q-HMC: the depth of a gravity point
//! mass, and the diffusion coefficient of a 1D elliptic problem with
//! adjoint-based gradients.

mod diffusion;
mod gravity;
mod kl;
mod tridiag;

pub use diffusion::{
    adjoint_solve, diffusion_posterior_potential, diffusion_solve, direct_jackson_perturbation,
    functional_gradient_field, DiffusionModel, DiffusionPosterior, Grid,
};
pub use gravity::{gravity_forward, gravity_potential, GravityModel, GravityPosterior};
pub use kl::{kl_expand, KlBasis};
pub use tridiag::solve_tridiagonal;
