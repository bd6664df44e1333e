//! Target potentials `U(x)` for `pi(x) ∝ exp(-U(x))`.
//!
//! Every target implements [`Potential`]; the built-in benchmarks are
//! registered by name in a [`PotentialRegistry`] so that experiment
//! configurations can select them at runtime.

mod benchmarks;
mod registry;

use std::fmt;
use std::sync::Arc;

pub use benchmarks::{discontinuous, double_well, gaussian, octic, stiff_2d, super_flat};
pub use registry::{PotentialFactory, PotentialRegistry, TargetParams};

use crate::error::{Error, Result};
use crate::qcalc::{jackson_dx, DeformationParameter, ScalarField};

pub trait Potential: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Closed-form gradient, where one exists.
    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// Coordinate-wise Jackson derivative of the potential. Targets with a
    /// cheaper route to the same quantity (e.g. adjoint solves) override this.
    fn q_gradient(&self, x: &[f64], dp: &DeformationParameter) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let f = |z: &[f64]| self.value(z);
        (0..self.dim()).map(|i| jackson_dx(&f, x, i, dp)).collect()
    }
}

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A potential assembled from closures.
#[derive(Clone)]
pub struct NamedPotential {
    name: String,
    dim: usize,
    value: ValueFn,
    gradient: Option<GradientFn>,
}

impl NamedPotential {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), dim, value: Arc::new(value), gradient: None }
    }

    pub fn with_gradient(mut self, gradient: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn field(&self) -> ScalarField {
        let value = Arc::clone(&self.value);
        ScalarField::new(self.dim, move |x| value(x))
    }
}

impl Potential for NamedPotential {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.gradient.as_ref().map(|g| g(x))
    }
}

impl fmt::Debug for NamedPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NamedPotential")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("has_gradient", &self.has_gradient())
            .finish()
    }
}
