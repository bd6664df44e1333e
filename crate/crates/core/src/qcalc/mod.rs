//! Numerical q-calculus: Jackson derivatives, the dilatation operator, the
//! q-deformed velocity and force fields and the q-Poisson bracket.
//!
//! The Jackson derivative in coordinate `i` is the difference quotient
//!
//! ```text
//! (f(z with z_i -> q^2 z_i) - f(z)) / ((q^2 - 1) z_i)
//! ```
//!
//! which tends to the ordinary partial derivative as `q -> 1`. Both removable
//! singularities (`q = 1` and `z_i = 0`) fall back to a central finite
//! difference.

mod hamiltonian;
mod jackson;

pub use hamiltonian::{Coupling, HamiltonianSpec};
pub use jackson::{
    dilate, force_field, jackson_dx, jackson_jacobian, poisson_bracket_q, velocity_field, DeformationParameter,
    FiniteDifference, ScalarField,
};
