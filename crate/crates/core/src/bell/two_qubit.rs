use nalgebra::Matrix3;

use crate::error::{QssError, Result};
use crate::qsim::{DensityMatrix, PauliAxis, PauliString, QuantumState};

/// `T_ij = tr(ρ σ_i ⊗ σ_j)`.
pub fn correlation_matrix_2q(rho: &DensityMatrix) -> Result<Matrix3<f64>> {
    if rho.n_qubits() != 2 {
        return Err(QssError::InvalidDimension(format!(
            "expected a two-qubit state, got {} qubits",
            rho.n_qubits()
        )));
    }
    let mut t = Matrix3::zeros();
    for a in PauliAxis::ALL {
        for b in PauliAxis::ALL {
            let p = PauliString::from_axes(&[a, b]);
            t[(a.index(), b.index())] = rho.expectation(&p)?;
        }
    }
    Ok(t)
}

/// Sum of the two largest eigenvalues of `TᵀT`; the state violates some CHSH
/// inequality iff this exceeds 1.
pub fn horodecki_m(rho: &DensityMatrix) -> Result<f64> {
    let t = correlation_matrix_2q(rho)?;
    let mut ev: Vec<f64> = (t.transpose() * t).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev[0] + ev[1])
}

/// Largest CHSH value reachable with the state, `2√M`.
pub fn chsh_max(rho: &DensityMatrix) -> Result<f64> {
    Ok(2.0 * horodecki_m(rho)?.sqrt())
}
