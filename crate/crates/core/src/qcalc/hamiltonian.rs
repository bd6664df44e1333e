use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::potentials::Potential;

/// Extra `x`-`p` interaction term added to the kinetic energy. Any coupling
/// makes the Hamiltonian non-separable.
pub type Coupling = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// `H(x, p) = U(x) + p^T M^{-1} p / 2 [+ coupling(x, p)]` with diagonal `M`.
#[derive(Clone)]
pub struct HamiltonianSpec {
    potential: Arc<dyn Potential>,
    mass: Vec<f64>,
    coupling: Option<Coupling>,
}

impl HamiltonianSpec {
    pub fn new(potential: Arc<dyn Potential>, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != potential.dim() {
            return Err(Error::DimensionMismatch {
                expected: potential.dim(),
                got: mass.len(),
            });
        }
        if let Some(m) = mass.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidArgument(format!("mass entries must be positive, got {m}")));
        }
        Ok(Self { potential, mass, coupling: None })
    }

    pub fn unit_mass(potential: Arc<dyn Potential>) -> Self {
        let mass = vec![1.0; potential.dim()];
        Self { potential, mass, coupling: None }
    }

    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = Some(coupling);
        self
    }

    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn is_separable(&self) -> bool {
        self.coupling.is_none()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn potential(&self) -> &dyn Potential {
        self.potential.as_ref()
    }

    pub fn potential_energy(&self, x: &[f64]) -> f64 {
        self.potential.value(x)
    }

    pub fn quadratic_kinetic(&self, p: &[f64]) -> f64 {
        0.5 * p.iter().zip(&self.mass).map(|(pi, mi)| pi * pi / mi).sum::<f64>()
    }

    pub fn kinetic(&self, x: &[f64], p: &[f64]) -> f64 {
        let k = self.quadratic_kinetic(p);
        match &self.coupling {
            Some(c) => k + c(x, p),
            None => k,
        }
    }

    pub fn energy(&self, x: &[f64], p: &[f64]) -> f64 {
        self.potential_energy(x) + self.kinetic(x, p)
    }
}

impl fmt::Debug for HamiltonianSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HamiltonianSpec")
            .field("potential", &self.potential.name())
            .field("mass", &self.mass)
            .field("separable", &self.is_separable())
            .finish()
    }
}
