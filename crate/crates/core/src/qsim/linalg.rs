use nalgebra::DMatrix;

use super::{C64, EIGEN_TOL};
use crate::error::{QssError, Result};

/// Largest entrywise deviation `|m - m†|`.
pub(crate) fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_hermitian(m: &DMatrix<C64>, tol: f64) -> bool {
    m.is_square() && hermitian_defect(m) <= tol
}

/// Real eigenvalues of a Hermitian matrix, sorted descending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(QssError::InvalidDimension(format!(
            "{}x{} matrix is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let defect = hermitian_defect(m);
    if defect > EIGEN_TOL {
        return Err(QssError::InvalidState(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    // symmetrize so the solver sees an exactly Hermitian input
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}
