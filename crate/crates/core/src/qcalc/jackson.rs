use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::HamiltonianSpec;
use crate::error::{Error, Result};

/// Finite-difference rule used where the Jackson quotient is singular.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiniteDifference {
    #[default]
    Central,
    Forward,
}

/// The deformation parameter `q` together with the tolerances that govern the
/// finite-difference fallbacks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeformationParameter {
    pub q: f64,
    /// `|q - 1|` below this is treated as the classical limit.
    pub classical_tol: f64,
    /// `|z_i|` below this is treated as the origin.
    pub zero_tol: f64,
    pub fd_step: f64,
    pub fallback: FiniteDifference,
}

impl Default for DeformationParameter {
    fn default() -> Self {
        Self {
            q: 1.0,
            classical_tol: Self::DEFAULT_CLASSICAL_TOL,
            zero_tol: Self::DEFAULT_ZERO_TOL,
            fd_step: Self::DEFAULT_FD_STEP,
            fallback: FiniteDifference::Central,
        }
    }
}

impl DeformationParameter {
    pub const DEFAULT_CLASSICAL_TOL: f64 = 1e-12;
    pub const DEFAULT_ZERO_TOL: f64 = 1e-8;
    pub const DEFAULT_FD_STEP: f64 = 1e-6;

    /// Builds a parameter with default tolerances. `q = 0` is admitted; the
    /// Jackson quotient then becomes a secant through the origin.
    pub fn new(q: f64) -> Result<Self> {
        let dp = Self { q, ..Self::default() };
        dp.validate()?;
        Ok(dp)
    }

    pub fn classical() -> Self {
        Self::default()
    }

    pub fn with_tolerances(mut self, classical_tol: f64, zero_tol: f64, fd_step: f64) -> Result<Self> {
        self.classical_tol = classical_tol;
        self.zero_tol = zero_tol;
        self.fd_step = fd_step;
        self.validate()?;
        Ok(self)
    }

    pub fn with_fallback(mut self, fallback: FiniteDifference) -> Self {
        self.fallback = fallback;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.q.is_finite() || self.q < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "q must be finite and non-negative, got {}",
                self.q
            )));
        }
        for (name, v) in [
            ("classical_tol", self.classical_tol),
            ("zero_tol", self.zero_tol),
            ("fd_step", self.fd_step),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_classical(&self) -> bool {
        (self.q - 1.0).abs() < self.classical_tol
    }
}

/// A real-valued function of a fixed-length real vector.
type FieldFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    eval: FieldFn,
}

impl ScalarField {
    pub fn new(dim: usize, eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { dim, eval: Arc::new(eval) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        (self.eval)(z)
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField").field("dim", &self.dim).finish_non_exhaustive()
    }
}

fn eval_checked<F>(f: &F, z: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let v = f(z);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { input: z.to_vec() })
    }
}

/// Evaluation points and divisor of one Jackson (or fallback) quotient in a
/// single coordinate: `(f(.., hi, ..) - f(.., lo, ..)) / denom`, where a
/// missing `lo` means the unshifted point.
struct Stencil {
    hi: f64,
    lo: Option<f64>,
    denom: f64,
}

fn stencil(zi: f64, dp: &DeformationParameter) -> Stencil {
    if dp.is_classical() || zi.abs() < dp.zero_tol {
        // step relative to |z_i| beyond 1 so that z_i + h stays distinct from z_i
        let h = dp.fd_step * zi.abs().max(1.0);
        match dp.fallback {
            FiniteDifference::Central => Stencil { hi: zi + h, lo: Some(zi - h), denom: (zi + h) - (zi - h) },
            FiniteDifference::Forward => Stencil { hi: zi + h, lo: None, denom: (zi + h) - zi },
        }
    } else {
        let q2 = dp.q * dp.q;
        Stencil { hi: q2 * zi, lo: None, denom: (q2 - 1.0) * zi }
    }
}

fn check_coordinate(z: &[f64], i: usize) -> Result<()> {
    if i >= z.len() {
        return Err(Error::InvalidArgument(format!(
            "coordinate {i} out of range for dimension {}",
            z.len()
        )));
    }
    Ok(())
}

/// Jackson derivative of `f` in coordinate `i` at `z`.
///
/// Falls back to the configured finite difference when `q` is within
/// `classical_tol` of one or `|z_i| < zero_tol`; both are removable limits
/// equal to the ordinary partial derivative.
pub fn jackson_dx<F>(f: &F, z: &[f64], i: usize, dp: &DeformationParameter) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    dp.validate()?;
    check_coordinate(z, i)?;
    let st = stencil(z[i], dp);
    let mut shifted = z.to_vec();
    shifted[i] = st.hi;
    let non_finite = |_| Error::NonFinite { input: z.to_vec() };
    let hi = eval_checked(f, &shifted).map_err(non_finite)?;
    let lo = match st.lo {
        Some(lo) => {
            shifted[i] = lo;
            eval_checked(f, &shifted).map_err(non_finite)?
        }
        None => eval_checked(f, z).map_err(non_finite)?,
    };
    let value = (hi - lo) / st.denom;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { input: z.to_vec() })
    }
}

/// Jackson Jacobian of a vector field: `out[(i, j)] = D_{w_j} g_i(w)`, using
/// the same quotient and fallbacks as [`jackson_dx`] column by column.
pub fn jackson_jacobian<G>(g: G, w: &[f64], dp: &DeformationParameter) -> Result<DMatrix<f64>>
where
    G: Fn(&[f64]) -> Result<Vec<f64>>,
{
    dp.validate()?;
    let d = w.len();
    let base = g(w)?;
    let mut out = DMatrix::<f64>::zeros(base.len(), d);
    let mut shifted = w.to_vec();
    for j in 0..d {
        let st = stencil(w[j], dp);
        shifted[j] = st.hi;
        let hi = g(&shifted)?;
        let lo = match st.lo {
            Some(lo) => {
                shifted[j] = lo;
                g(&shifted)?
            }
            None => base.clone(),
        };
        shifted[j] = w[j];
        for i in 0..base.len() {
            let v = (hi[i] - lo[i]) / st.denom;
            if !v.is_finite() {
                return Err(Error::NonFinite { input: w.to_vec() });
            }
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

/// Componentwise scaling `z -> q z`.
pub fn dilate(z: &[f64], q: f64) -> Vec<f64> {
    z.iter().map(|v| q * v).collect()
}

fn check_phase_dims(h: &HamiltonianSpec, x: &[f64], p: &[f64]) -> Result<()> {
    for len in [x.len(), p.len()] {
        if len != h.dim() {
            return Err(Error::DimensionMismatch { expected: h.dim(), got: len });
        }
    }
    Ok(())
}

/// `v_i = q^{-1/2} D_{p_i}[H(q x, p)]`.
///
/// For a separable Hamiltonian the dilated potential term is independent of
/// `p` and drops out of the quotient, so only the kinetic energy is
/// differenced. The result is then independent of `x`.
pub fn velocity_field(
    h: &HamiltonianSpec,
    x: &[f64],
    p: &[f64],
    dp: &DeformationParameter,
) -> Result<Vec<f64>> {
    check_phase_dims(h, x, p)?;
    let scale = dp.q.powf(-0.5);
    if h.is_separable() {
        let kinetic = |pp: &[f64]| h.quadratic_kinetic(pp);
        (0..h.dim())
            .map(|i| jackson_dx(&kinetic, p, i, dp).map(|g| scale * g))
            .collect()
    } else {
        let qx = dilate(x, dp.q);
        let energy = |pp: &[f64]| h.energy(&qx, pp);
        (0..h.dim())
            .map(|i| jackson_dx(&energy, p, i, dp).map(|g| scale * g))
            .collect()
    }
}

/// `F_i = q^{1/2} D_{x_i}[H(x, p)]`; the momentum update is `p' = p - dt F`.
///
/// For a separable Hamiltonian this is `q^{1/2}` times the potential's
/// q-gradient and does not depend on `p`.
pub fn force_field(
    h: &HamiltonianSpec,
    x: &[f64],
    p: &[f64],
    dp: &DeformationParameter,
) -> Result<Vec<f64>> {
    check_phase_dims(h, x, p)?;
    let scale = dp.q.sqrt();
    if h.is_separable() {
        let grad = h.potential().q_gradient(x, dp)?;
        Ok(grad.into_iter().map(|g| scale * g).collect())
    } else {
        let energy = |xx: &[f64]| h.energy(xx, p);
        (0..h.dim())
            .map(|i| jackson_dx(&energy, x, i, dp).map(|g| scale * g))
            .collect()
    }
}

/// q-Poisson bracket on the two-dimensional phase space `z = (x, p)`:
///
/// `{f, g}_q = q^{-1/2} D_p[g(q x, p)] D_x f - q^{1/2} D_x g D_p f`.
pub fn poisson_bracket_q(
    f: &ScalarField,
    g: &ScalarField,
    z: &[f64],
    dp: &DeformationParameter,
) -> Result<f64> {
    if z.len() != 2 || f.dim() != 2 || g.dim() != 2 {
        let got = z.len().max(f.dim()).max(g.dim()) / 2;
        return Err(Error::UnsupportedDimension { supported: 1, got });
    }
    let q = dp.q;
    let f_eval = |w: &[f64]| f.eval(w);
    let g_eval = |w: &[f64]| g.eval(w);
    let g_dilated = |w: &[f64]| g.eval(&[q * w[0], w[1]]);

    let dx_f = jackson_dx(&f_eval, z, 0, dp)?;
    let dp_f = jackson_dx(&f_eval, z, 1, dp)?;
    let dx_g = jackson_dx(&g_eval, z, 0, dp)?;
    let dp_dilated_g = jackson_dx(&g_dilated, z, 1, dp)?;

    Ok(q.powf(-0.5) * dp_dilated_g * dx_f - q.sqrt() * dx_g * dp_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{self, NamedPotential};
    use approx::assert_abs_diff_eq;

    fn dp(q: f64) -> DeformationParameter {
        DeformationParameter::new(q).unwrap()
    }

    fn monomial(n: i32) -> impl Fn(&[f64]) -> f64 {
        move |z: &[f64]| z[0].powi(n)
    }

    #[test]
    fn jackson_square_at_two() {
        let d = jackson_dx(&monomial(2), &[2.0], 0, &dp(0.9)).unwrap();
        assert_abs_diff_eq!(d, 3.62, epsilon = 1e-12);
        let d = jackson_dx(&monomial(2), &[2.0], 0, &dp(1.0)).unwrap();
        assert_abs_diff_eq!(d, 4.0, epsilon = 1e-6);
    }

    #[test]
    fn jackson_quartic_and_octic() {
        let d = jackson_dx(&monomial(4), &[1.0], 0, &dp(1.2)).unwrap();
        assert_abs_diff_eq!(d, 3.29981696 / 0.44, epsilon = 1e-10);
        let d = jackson_dx(&monomial(8), &[1.7], 0, &dp(0.9)).unwrap();
        assert_abs_diff_eq!(d, 175.95, epsilon = 0.01);
    }

    #[test]
    fn jackson_rejects_bad_parameters() {
        let bad = DeformationParameter { q: -0.5, ..Default::default() };
        assert!(matches!(
            jackson_dx(&monomial(2), &[1.0], 0, &bad),
            Err(Error::InvalidParameter(_))
        ));
        let bad = DeformationParameter { fd_step: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(DeformationParameter::new(f64::NAN).is_err());
        assert!(matches!(
            jackson_dx(&monomial(2), &[1.0], 1, &dp(0.9)),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn jackson_reports_non_finite_input() {
        let f = |z: &[f64]| 1.0 / (z[0] - 0.81);
        let err = jackson_dx(&f, &[1.0], 0, &dp(0.9)).unwrap_err();
        assert_eq!(err, Error::NonFinite { input: vec![1.0] });
    }

    #[test]
    fn jackson_at_zero_q_is_secant_to_origin() {
        let d = jackson_dx(&monomial(2), &[2.0], 0, &dp(0.0)).unwrap();
        assert_abs_diff_eq!(d, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn jackson_near_origin_uses_fallback() {
        let d = jackson_dx(&|z: &[f64]| z[0].sin(), &[0.0], 0, &dp(0.9)).unwrap();
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn forward_fallback() {
        let fwd = DeformationParameter::classical()
            .with_fallback(FiniteDifference::Forward)
            .with_tolerances(1e-12, 1e-8, 1e-8)
            .unwrap();
        let d = jackson_dx(&monomial(2), &[2.0], 0, &fwd).unwrap();
        assert_abs_diff_eq!(d, 4.0, epsilon = 1e-6);
    }

    #[test]
    fn dilate_examples() {
        assert_eq!(dilate(&[1.7], 1.0), vec![1.7]);
        assert_abs_diff_eq!(dilate(&[1.7], 1.1)[0], 1.87, epsilon = 1e-12);
        assert_eq!(dilate(&[2.0, -3.0], 0.5), vec![1.0, -1.5]);
    }

    fn separable(p: NamedPotential) -> HamiltonianSpec {
        HamiltonianSpec::unit_mass(Arc::new(p))
    }

    #[test]
    fn velocity_examples() {
        let h = separable(potentials::gaussian(1.0).unwrap());
        let v = velocity_field(&h, &[0.3], &[1.0], &dp(0.9)).unwrap();
        assert_abs_diff_eq!(v[0], (1.0f64 / 0.9).sqrt() * 1.81 / 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(v[0], 0.953954, epsilon = 1e-6);
        let v = velocity_field(&h, &[0.3], &[1.0], &dp(1.0)).unwrap();
        assert_abs_diff_eq!(v[0], 1.0, epsilon = 1e-6);
        let v = velocity_field(&h, &[5.0], &[0.0], &dp(0.9)).unwrap();
        assert_abs_diff_eq!(v[0], 0.0, epsilon = 1e-6);
    }

    #[test]
    fn velocity_respects_mass() {
        let h = HamiltonianSpec::new(Arc::new(potentials::gaussian(1.0).unwrap()), vec![4.0]).unwrap();
        let v = velocity_field(&h, &[0.0], &[2.0], &dp(1.1)).unwrap();
        let expected = 1.1f64.powf(-0.5) * (1.21 + 1.0) / 2.0 * 2.0 / 4.0;
        assert_abs_diff_eq!(v[0], expected, epsilon = 1e-12);
    }

    #[test]
    fn force_examples() {
        let h = separable(potentials::octic());
        let f1 = force_field(&h, &[1.7], &[0.0], &dp(1.0)).unwrap()[0];
        assert!((f1 - 328.06).abs() / 328.06 < 5e-3);
        assert_abs_diff_eq!(f1, 8.0 * 1.7f64.powi(7), epsilon = 1e-4);
        let f09 = force_field(&h, &[1.7], &[0.0], &dp(0.9)).unwrap()[0];
        assert_abs_diff_eq!(f09, 166.92, epsilon = 0.01);
        let f11 = force_field(&h, &[1.7], &[0.0], &dp(1.1)).unwrap()[0];
        assert!(f09 < f1 && f1 < f11);

        let g = separable(potentials::gaussian(1.0).unwrap());
        for q in [0.5, 0.9, 1.0, 1.3] {
            let f = force_field(&g, &[0.0], &[1.0], &dp(q)).unwrap()[0];
            assert_abs_diff_eq!(f, 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn separable_force_ignores_momentum() {
        let h = separable(potentials::double_well());
        let a = force_field(&h, &[0.7], &[0.1], &dp(0.93)).unwrap();
        let b = force_field(&h, &[0.7], &[-3.0], &dp(0.93)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn field_dimension_mismatch() {
        let h = separable(potentials::octic());
        assert!(matches!(
            velocity_field(&h, &[1.0, 2.0], &[0.0], &dp(0.9)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn phase_hamiltonian(u: fn(f64) -> f64) -> ScalarField {
        ScalarField::new(2, move |z: &[f64]| u(z[0]) + 0.5 * z[1] * z[1])
    }

    #[test]
    fn bracket_examples() {
        let x = ScalarField::new(2, |z: &[f64]| z[0]);
        let p = ScalarField::new(2, |z: &[f64]| z[1]);
        let h = phase_hamiltonian(|x| 0.5 * x * x);

        let b = poisson_bracket_q(&x, &h, &[1.0, 2.0], &dp(0.9)).unwrap();
        assert_abs_diff_eq!(b, 1.907908, epsilon = 1e-6);
        assert_abs_diff_eq!(b, 2.0 * (1.0f64 / 0.9).sqrt() * 1.81 / 2.0, epsilon = 1e-9);

        let b = poisson_bracket_q(&p, &h, &[2.0, 1.0], &dp(1.0)).unwrap();
        assert_abs_diff_eq!(b, -2.0, epsilon = 1e-6);

        for q in [0.3, 0.9, 1.0, 1.7] {
            let b = poisson_bracket_q(&x, &x, &[0.4, -1.1], &dp(q)).unwrap();
            assert_eq!(b, 0.0);
        }
    }

    #[test]
    fn bracket_rejects_higher_dimension() {
        let f = ScalarField::new(4, |z: &[f64]| z[0]);
        let err = poisson_bracket_q(&f, &f, &[0.0; 4], &dp(0.9)).unwrap_err();
        assert_eq!(err, Error::UnsupportedDimension { supported: 1, got: 2 });
    }
}
