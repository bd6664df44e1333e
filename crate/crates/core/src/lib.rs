//! q-deformed Hamiltonian Monte Carlo.
//!
//! Hamiltonian dynamics with Jackson derivatives in place of ordinary
//! derivatives, discretised by a q-leapfrog integrator whose q-Jacobian enters
//! a Metropolis correction. Includes mixing diagnostics, benchmark targets and
//! two Bayesian inverse problems (a gravity point mass and a 1D diffusion
//! coefficient with adjoint gradients).

pub mod diagnostics;
pub mod error;
pub mod integrator;
pub mod inverse;
pub mod potentials;
pub mod qcalc;
pub mod sampler;

pub use error::{Error, Result};
