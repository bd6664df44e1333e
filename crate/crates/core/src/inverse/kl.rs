use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated Karhunen-Loeve basis of `Gamma = (-Laplacian)^{-s}` on `[0, 1]`
/// with Dirichlet conditions: eigenvalues `(k pi)^{-2s}` and modes
/// `sqrt(2) sin(k pi x)`, `k = 1..=n_modes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlBasis {
    n_modes: usize,
    smoothness: f64,
    eigenvalues: Vec<f64>,
}

impl KlBasis {
    pub fn new(n_modes: usize, smoothness: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidParameter("n_modes must be positive".into()));
        }
        if !(smoothness.is_finite() && smoothness > 0.0) {
            return Err(Error::InvalidParameter(format!("smoothness must be positive, got {smoothness}")));
        }
        let eigenvalues = (1..=n_modes).map(|k| (k as f64 * PI).powf(-2.0 * smoothness)).collect();
        Ok(Self { n_modes, smoothness, eigenvalues })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn smoothness(&self) -> f64 {
        self.smoothness
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `phi_k(x) = sqrt(2) sin(k pi x)` for 1-based `k`.
    pub fn mode(&self, k: usize, x: f64) -> f64 {
        SQRT_2 * (k as f64 * PI * x).sin()
    }

    /// `sqrt(lambda_k) phi_k(x_i)` for every mode (rows) and node (columns).
    pub fn scaled_modes(&self, nodes: &[f64]) -> Vec<Vec<f64>> {
        (1..=self.n_modes)
            .map(|k| {
                let s = self.eigenvalues[k - 1].sqrt();
                nodes.iter().map(|&x| s * self.mode(k, x)).collect()
            })
            .collect()
    }
}

/// `alpha(x_i) = exp(sum_k theta_k sqrt(lambda_k) phi_k(x_i))`. The whitened
/// coefficients `theta` carry a standard normal prior.
pub fn kl_expand(theta: &[f64], kl: &KlBasis, nodes: &[f64]) -> Result<Vec<f64>> {
    if theta.len() != kl.n_modes() {
        return Err(Error::DimensionMismatch { expected: kl.n_modes(), got: theta.len() });
    }
    Ok(nodes
        .iter()
        .map(|&x| {
            let kappa: f64 = theta
                .iter()
                .enumerate()
                .map(|(i, t)| t * kl.eigenvalues[i].sqrt() * kl.mode(i + 1, x))
                .sum();
            kappa.exp()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eigenvalues_decrease() {
        let kl = KlBasis::new(9, 1.0).unwrap();
        assert!(kl.eigenvalues().windows(2).all(|w| w[1] < w[0] && w[1] > 0.0));
        assert_abs_diff_eq!(kl.eigenvalues()[0].sqrt(), std::f64::consts::FRAC_1_PI, epsilon = 1e-12);
        assert!(KlBasis::new(0, 1.0).is_err());
        assert!(KlBasis::new(3, 0.0).is_err());
    }

    #[test]
    fn expansion_examples() {
        let kl = KlBasis::new(4, 1.0).unwrap();
        let nodes = [0.0, 0.25, 0.5, 1.0];
        assert_eq!(kl_expand(&[0.0; 4], &kl, &nodes).unwrap(), vec![1.0; 4]);
        let alpha = kl_expand(&[1.0, 0.0, 0.0, 0.0], &kl, &[0.5]).unwrap();
        assert_abs_diff_eq!(alpha[0].ln(), 0.450158, epsilon = 1e-5);
        assert!(kl_expand(&[1.0], &kl, &nodes).is_err());
    }

    #[test]
    fn scaled_modes_match_expansion() {
        let kl = KlBasis::new(3, 1.5).unwrap();
        let nodes = [0.1, 0.4, 0.77];
        let theta = [0.3, -1.2, 0.8];
        let table = kl.scaled_modes(&nodes);
        let alpha = kl_expand(&theta, &kl, &nodes).unwrap();
        for (i, a) in alpha.iter().enumerate() {
            let kappa: f64 = (0..3).map(|k| theta[k] * table[k][i]).sum();
            assert_abs_diff_eq!(a.ln(), kappa, epsilon = 1e-14);
        }
    }
}
