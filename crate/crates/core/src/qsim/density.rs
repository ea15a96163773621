use nalgebra::DMatrix;

use super::linalg::hermitian_defect;
use super::{
    check_qubits, eigenvector, hermitian_eigenvalues, qubit_mask, PauliAxis, PauliString,
    PureState, QuantumState, Split, C64, EXACT_TOL, MAX_DENSITY_QUBITS, ZERO_PROBABILITY,
};
use crate::error::{QssError, Result};

/// Eigenvalues below this are a PSD violation.
const PSD_TOL: f64 = 1e-9;

/// A dense density operator on up to [`MAX_DENSITY_QUBITS`] qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian, unit trace, positive semidefinite.
    pub fn new(n_qubits: usize, matrix: DMatrix<C64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_DENSITY_QUBITS {
            return Err(QssError::InvalidDimension(format!(
                "density matrices support 1..={MAX_DENSITY_QUBITS} qubits, got {n_qubits}"
            )));
        }
        let d = 1usize << n_qubits;
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QssError::InvalidDimension(format!(
                "{}x{} matrix for {n_qubits} qubits",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let rho = Self { n_qubits, matrix };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(n_qubits: usize, matrix: DMatrix<C64>) -> Self {
        Self { n_qubits, matrix }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_DENSITY_QUBITS {
            return Err(QssError::InvalidDimension(format!(
                "density matrices support 1..={MAX_DENSITY_QUBITS} qubits, got {n_qubits}"
            )));
        }
        let d = 1usize << n_qubits;
        Ok(Self {
            n_qubits,
            matrix: DMatrix::from_diagonal_element(d, d, C64::new(1.0 / d as f64, 0.0)),
        })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Checks the Hermitian, trace and PSD invariants.
    pub fn validate(&self) -> Result<()> {
        let defect = hermitian_defect(&self.matrix);
        if defect > EXACT_TOL {
            return Err(QssError::InvalidState(format!(
                "density matrix not Hermitian (defect {defect:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > EXACT_TOL {
            return Err(QssError::InvalidState(format!("trace is {tr}")));
        }
        let min = self.eigenvalues()?.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(QssError::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `p·self + (1−p)·other`.
    pub fn mix(&self, p: f64, other: &Self) -> Result<Self> {
        self.check_same_register(other)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(QssError::InvalidArgument(format!("mixing weight {p} outside [0,1]")));
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * C64::new(p, 0.0) + &other.matrix * C64::new(1.0 - p, 0.0),
        })
    }

    fn check_same_register(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(QssError::InvalidDimension(format!(
                "{} vs {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_register(other)?;
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `½‖self − other‖₁`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        self.check_same_register(other)?;
        let diff = &self.matrix - &other.matrix;
        Ok(0.5 * hermitian_eigenvalues(&diff)?.iter().map(|v| v.abs()).sum::<f64>())
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with(&self, psi: &PureState) -> Result<f64> {
        if psi.n_qubits() != self.n_qubits {
            return Err(QssError::InvalidDimension(format!(
                "{} vs {} qubits",
                psi.n_qubits(),
                self.n_qubits
            )));
        }
        let a = psi.amplitudes();
        let mut total = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                total += a[i].conj() * self.matrix[(i, j)] * a[j];
            }
        }
        Ok(total.re)
    }

    /// `tr(ρ P)` without the Hermiticity check.
    pub(crate) fn expectation_unchecked(&self, pauli: &PauliString) -> C64 {
        // P|i> = phase(i)|i^mask>, so tr(ρP) = Σ_i ρ[i, i^mask]·phase(i)
        let mask = pauli.flip_mask();
        (0..self.dim())
            .map(|i| self.matrix[(i, i ^ mask)] * pauli.phase(i))
            .sum()
    }

    /// Applies `m` to `qubit` on the row side and `m†` on the column side.
    fn conjugate_qubit(&mut self, qubit: usize, m: [[C64; 2]; 2]) {
        let mask = qubit_mask(qubit, self.n_qubits);
        let d = self.dim();
        for col in 0..d {
            for i0 in (0..d).filter(|i| i & mask == 0) {
                let i1 = i0 | mask;
                let (a0, a1) = (self.matrix[(i0, col)], self.matrix[(i1, col)]);
                self.matrix[(i0, col)] = m[0][0] * a0 + m[0][1] * a1;
                self.matrix[(i1, col)] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        for row in 0..d {
            for j0 in (0..d).filter(|j| j & mask == 0) {
                let j1 = j0 | mask;
                let (a0, a1) = (self.matrix[(row, j0)], self.matrix[(row, j1)]);
                self.matrix[(row, j0)] = a0 * m[0][0].conj() + a1 * m[0][1].conj();
                self.matrix[(row, j1)] = a0 * m[1][0].conj() + a1 * m[1][1].conj();
            }
        }
    }

    /// Post-selects `qubits[k]` on the `outcomes[k]` eigenvector of `bases[k]`.
    pub fn project_bases(
        &self,
        qubits: &[usize],
        bases: &[PauliAxis],
        outcomes: &[i8],
    ) -> Result<(f64, Self)> {
        check_qubits(qubits, self.n_qubits)?;
        if bases.len() != qubits.len() || outcomes.len() != qubits.len() {
            return Err(QssError::InvalidDimension(format!(
                "{} qubits, {} bases, {} outcomes",
                qubits.len(),
                bases.len(),
                outcomes.len()
            )));
        }
        super::Outcome::new(outcomes.to_vec())?;
        let mut out = self.clone();
        for ((&q, &axis), &sign) in qubits.iter().zip(bases).zip(outcomes) {
            let e = eigenvector(axis, sign);
            out.conjugate_qubit(
                q,
                [
                    [e[0] * e[0].conj(), e[0] * e[1].conj()],
                    [e[1] * e[0].conj(), e[1] * e[1].conj()],
                ],
            );
        }
        let probability = out.trace().re;
        if probability <= ZERO_PROBABILITY {
            return Err(QssError::ZeroProbabilityBranch(probability));
        }
        out.matrix /= C64::new(probability, 0.0);
        Ok((probability, out))
    }

    pub fn project(&self, qubits: &[usize], basis: PauliAxis, outcomes: &[i8]) -> Result<(f64, Self)> {
        self.project_bases(qubits, &vec![basis; qubits.len()], outcomes)
    }

    /// Reduced state on `keep`; equivalent to [`QuantumState::reduced`].
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(QssError::InvalidArgument("empty keep-set".into()));
        }
        check_qubits(keep, self.n_qubits)?;
        let split = Split::new(keep, self.n_qubits);
        let d = split.kept.len();
        let matrix = DMatrix::from_fn(d, d, |a, b| {
            split
                .traced
                .iter()
                .map(|&t| self.matrix[(split.kept[a] | t, split.kept[b] | t)])
                .sum()
        });
        Ok(Self {
            n_qubits: keep.len(),
            matrix,
        })
    }
}

impl QuantumState for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn raw_expectation(&self, pauli: &PauliString) -> C64 {
        self.expectation_unchecked(pauli)
    }

    fn check_valid(&self) -> Result<()> {
        let defect = hermitian_defect(&self.matrix);
        if defect > EXACT_TOL {
            return Err(QssError::InvalidState(format!(
                "density matrix not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(())
    }

    fn expectation(&self, pauli: &PauliString) -> Result<f64> {
        if pauli.n_qubits() != self.n_qubits {
            return Err(QssError::InvalidDimension(format!(
                "Pauli string on {} qubits for a {}-qubit state",
                pauli.n_qubits(),
                self.n_qubits
            )));
        }
        let defect = hermitian_defect(&self.matrix);
        if defect > EXACT_TOL {
            return Err(QssError::InvalidState(format!(
                "density matrix not Hermitian (defect {defect:.3e})"
            )));
        }
        let value = self.expectation_unchecked(pauli);
        if value.im.abs() > EXACT_TOL {
            return Err(QssError::InvalidState(format!(
                "expectation has imaginary part {}",
                value.im
            )));
        }
        Ok(value.re.clamp(-1.0, 1.0))
    }

    fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.partial_trace(keep)
    }
}
