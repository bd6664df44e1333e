use super::NamedPotential;
use crate::error::{Error, Result};

/// `U(x) = (x^2 - 1)^2`, modes at ±1.
pub fn double_well() -> NamedPotential {
    NamedPotential::new("double_well", 1, |x| (x[0] * x[0] - 1.0).powi(2))
        .with_gradient(|x| vec![4.0 * x[0] * (x[0] * x[0] - 1.0)])
}

/// `U(x) = |x|^{1/2}`. No closed-form gradient: the cusp at the origin is
/// handled by the Jackson fallback.
pub fn super_flat() -> NamedPotential {
    NamedPotential::new("super_flat", 1, |x| x[0].abs().sqrt())
}

/// `U(x) = x^2/2` for `x < 0` and `x^2/2 + 3` for `x >= 0`.
pub fn discontinuous() -> NamedPotential {
    NamedPotential::new("discontinuous", 1, |x| {
        let base = 0.5 * x[0] * x[0];
        if x[0] >= 0.0 {
            base + 3.0
        } else {
            base
        }
    })
}

/// `U(x) = x^8`.
pub fn octic() -> NamedPotential {
    NamedPotential::new("octic", 1, |x| x[0].powi(8)).with_gradient(|x| vec![8.0 * x[0].powi(7)])
}

/// `U(x1, x2) = (x1^2 + x2^2)^4 / 8`.
pub fn stiff_2d() -> NamedPotential {
    NamedPotential::new("stiff_2d", 2, |x| (x[0] * x[0] + x[1] * x[1]).powi(4) / 8.0).with_gradient(|x| {
        let r3 = (x[0] * x[0] + x[1] * x[1]).powi(3);
        vec![x[0] * r3, x[1] * r3]
    })
}

/// `U(x) = x^2 / (2 variance)`.
pub fn gaussian(variance: f64) -> Result<NamedPotential> {
    if !(variance.is_finite() && variance > 0.0) {
        return Err(Error::InvalidArgument(format!("variance must be positive, got {variance}")));
    }
    Ok(NamedPotential::new("gaussian", 1, move |x| x[0] * x[0] / (2.0 * variance))
        .with_gradient(move |x| vec![x[0] / variance]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Potential;
    use crate::qcalc::{jackson_dx, DeformationParameter};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn double_well_values() {
        let u = double_well();
        assert_eq!(u.value(&[1.0]), 0.0);
        assert_eq!(u.value(&[-1.0]), 0.0);
        assert_eq!(u.value(&[0.0]), 1.0);
        assert_eq!(u.value(&[4.0]), 225.0);
        assert_eq!(u.gradient(&[2.0]).unwrap(), vec![24.0]);
    }

    #[test]
    fn super_flat_values() {
        let u = super_flat();
        assert_eq!(u.value(&[4.0]), 2.0);
        assert_eq!(u.value(&[0.0]), 0.0);
        assert_eq!(u.value(&[-9.0]), 3.0);
        assert!(u.gradient(&[1.0]).is_none());
    }

    #[test]
    fn discontinuous_values() {
        let u = discontinuous();
        assert_eq!(u.value(&[-1.0]), 0.5);
        assert_eq!(u.value(&[0.0]), 3.0);
        assert_eq!(u.value(&[1.0]), 3.5);
    }

    #[test]
    fn octic_values() {
        let u = octic();
        assert_abs_diff_eq!(u.value(&[1.7]), 69.7576, epsilon = 1e-3);
        assert_abs_diff_eq!(u.gradient(&[1.7]).unwrap()[0], 328.271, epsilon = 1e-2);
        assert_eq!(u.value(&[0.0]), 0.0);
    }

    #[test]
    fn stiff_2d_values() {
        let u = stiff_2d();
        assert_abs_diff_eq!(u.value(&[1.6, 1.6]), 85.8994, epsilon = 1e-3);
        assert_eq!(u.value(&[0.0, 0.0]), 0.0);
        let (a, b) = (0.3, -1.2);
        assert_eq!(u.value(&[a, b]), u.value(&[b, a]));
        assert_eq!(u.value(&[a, b]), u.value(&[-a, b]));
    }

    #[test]
    fn gaussian_values() {
        let u = gaussian(1.0).unwrap();
        assert_eq!(u.value(&[2.0]), 2.0);
        assert_eq!(u.value(&[0.0]), 0.0);
        assert_eq!(u.gradient(&[3.0]).unwrap(), vec![3.0]);
        assert!(gaussian(0.0).is_err());
        assert!(gaussian(-1.0).is_err());
    }

    fn smooth() -> Vec<NamedPotential> {
        vec![double_well(), octic(), stiff_2d(), gaussian(2.5).unwrap()]
    }

    #[test]
    fn analytic_gradients_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = 1e-5;
        for u in smooth() {
            for _ in 0..50 {
                let x: Vec<f64> = (0..u.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
                let g = u.gradient(&x).unwrap();
                for i in 0..u.dim() {
                    let mut hi = x.clone();
                    let mut lo = x.clone();
                    hi[i] += h;
                    lo[i] -= h;
                    let fd = (u.value(&hi) - u.value(&lo)) / (2.0 * h);
                    let scale = g[i].abs().max(1.0);
                    assert!((fd - g[i]).abs() / scale < 1e-6, "{} at {x:?}: {fd} vs {}", u.name(), g[i]);
                }
            }
        }
    }

    #[test]
    fn jackson_close_to_classical_near_unit_q() {
        let dp = DeformationParameter::new(1.0 + 1e-3).unwrap();
        for u in smooth() {
            for x0 in [0.5, 1.7, 3.0] {
                let x = vec![x0; u.dim()];
                let g = u.gradient(&x).unwrap();
                let f = |z: &[f64]| u.value(z);
                for (i, gi) in g.iter().enumerate() {
                    let j = jackson_dx(&f, &x, i, &dp).unwrap();
                    assert!((j - gi).abs() <= 0.01 * gi.abs().max(1e-12), "{} at {x0}", u.name());
                }
            }
        }
    }

    #[test]
    fn even_potentials() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for u in [double_well(), super_flat(), octic(), stiff_2d()] {
            for _ in 0..50 {
                let x: Vec<f64> = (0..u.dim()).map(|_| rng.random_range(-3.0..3.0)).collect();
                let neg: Vec<f64> = x.iter().map(|v| -v).collect();
                assert_eq!(u.value(&x), u.value(&neg));
            }
        }
    }

    #[test]
    fn finite_everywhere_on_finite_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for u in [double_well(), super_flat(), discontinuous(), octic(), stiff_2d(), gaussian(1.0).unwrap()] {
            for _ in 0..100 {
                let x: Vec<f64> = (0..u.dim()).map(|_| rng.random_range(-10.0..10.0)).collect();
                assert!(u.value(&x).is_finite());
            }
        }
    }
}
