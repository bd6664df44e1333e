use crate::error::{Error, Result};

/// Solves `A x = rhs` for tridiagonal `A` with diagonal `diag`, sub-diagonal
/// `lower` and super-diagonal `upper` (both of length `n - 1`) by the Thomas
/// algorithm. Requires a non-singular system without pivoting, which holds for
/// the diagonally dominant operators used here.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: rhs.len() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if lower.len() != n - 1 || upper.len() != n - 1 {
        return Err(Error::DimensionMismatch { expected: n - 1, got: lower.len().min(upper.len()) });
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(Error::InvalidArgument("zero pivot in tridiagonal solve".into()));
    }
    c[0] = if n > 1 { upper[0] / pivot } else { 0.0 };
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i - 1] * c[i - 1];
        if pivot == 0.0 {
            return Err(Error::InvalidArgument("zero pivot in tridiagonal solve".into()));
        }
        if i < n - 1 {
            c[i] = upper[i] / pivot;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}
