use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Hermiticity tolerance accepted by [`min_eigenvalue`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Smallest eigenvalue of a Hermitian matrix.
///
/// Householder tridiagonalization followed by implicit QR. Matrices with an
/// identically zero imaginary part go through the real solver.
pub fn min_eigenvalue(h: &CMatrix) -> Result<f64> {
    eigenvalues(h).map(|v| v.into_iter().fold(f64::INFINITY, f64::min))
}

/// All eigenvalues, ascending.
pub fn eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    h.ensure_hermitian(HERMITIAN_TOLERANCE)?;
    let dim = h.dim();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let max_iter = 1000 * dim.max(10);
    let mut values: Vec<f64> = if h.max_imag() == 0.0 {
        let real = DMatrix::from_fn(dim, dim, |i, j| h[(i, j)].re);
        SymmetricEigen::try_new(real, f64::EPSILON, max_iter)
            .ok_or(Error::EigenNoConvergence)?
            .eigenvalues
            .iter()
            .copied()
            .collect()
    } else {
        SymmetricEigen::try_new(h.to_nalgebra(), f64::EPSILON, max_iter)
            .ok_or(Error::EigenNoConvergence)?
            .eigenvalues
            .iter()
            .copied()
            .collect()
    };
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenNoConvergence);
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}
