use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    bit_of, check_qubits, eigenvector, qubit_mask, DensityMatrix, Outcome, PauliAxis, PauliString,
    QuantumState, Split, C64, EXACT_TOL, MAX_DENSITY_QUBITS, MAX_STATEVECTOR_QUBITS,
    ZERO_PROBABILITY,
};
use crate::error::{QssError, Result};

/// A normalized statevector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

/// On-disk form: `{n_qubits, amplitudes: [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
struct StateDocument {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

fn check_register(n: usize) -> Result<()> {
    if n == 0 || n > MAX_STATEVECTOR_QUBITS {
        return Err(QssError::InvalidDimension(format!(
            "statevectors support 1..={MAX_STATEVECTOR_QUBITS} qubits, got {n}"
        )));
    }
    Ok(())
}

impl PureState {
    /// Wraps an amplitude vector, checking length and unit norm.
    pub fn new(n_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_register(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(QssError::InvalidDimension(format!(
                "{} amplitudes for {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        let norm: f64 = amplitudes.iter().map(C64::norm_sqr).sum();
        if (norm - 1.0).abs() > EXACT_TOL {
            return Err(QssError::InvalidState(format!("norm² is {norm}, expected 1")));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn from_unnormalized(n_qubits: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        check_register(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(QssError::InvalidDimension(format!(
                "{} amplitudes for {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
        if norm < ZERO_PROBABILITY {
            return Err(QssError::InvalidState("zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Equal-weight superposition of the given basis indices.
    pub fn uniform_superposition(n_qubits: usize, indices: &[usize]) -> Result<Self> {
        check_register(n_qubits)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        for &i in indices {
            let slot = amps.get_mut(i).ok_or_else(|| {
                QssError::InvalidDimension(format!("index {i} out of range for {n_qubits} qubits"))
            })?;
            *slot = C64::new(1.0, 0.0);
        }
        Self::from_unnormalized(n_qubits, amps)
    }

    /// Computational basis state; `bits[0]` is qubit 0 (most significant).
    pub fn basis(n_qubits: usize, bits: &str) -> Result<Self> {
        check_register(n_qubits)?;
        if bits.chars().count() != n_qubits {
            return Err(QssError::InvalidDimension(format!(
                "bitstring '{bits}' does not have {n_qubits} bits"
            )));
        }
        let mut index = 0usize;
        for c in bits.chars() {
            index = (index << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    other => {
                        return Err(QssError::InvalidArgument(format!(
                            "bitstring character '{other}'"
                        )))
                    }
                };
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes: amps,
        })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
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

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.check_same_register(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `min_θ ‖self − e^{iθ}·other‖`.
    pub fn distance_up_to_phase(&self, other: &Self) -> Result<f64> {
        let overlap = self.inner(other)?.norm();
        Ok((2.0 - 2.0 * overlap).max(0.0).sqrt())
    }

    /// Largest entrywise amplitude difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_register(other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn apply_pauli(&self, pauli: &PauliString) -> Result<Self> {
        self.check_pauli(pauli)?;
        let mask = pauli.flip_mask();
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            out[i ^ mask] = pauli.phase(i) * a;
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            amplitudes: out,
        })
    }

    fn check_pauli(&self, pauli: &PauliString) -> Result<()> {
        if pauli.n_qubits() != self.n_qubits {
            return Err(QssError::InvalidDimension(format!(
                "Pauli string on {} qubits applied to {} qubits",
                pauli.n_qubits(),
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        check_register(self.n_qubits + other.n_qubits)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes,
        })
    }

    /// Reorders qubits: new qubit `i` is old qubit `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_qubits;
        if perm.len() != n {
            return Err(QssError::InvalidDimension(format!(
                "permutation of length {} for {n} qubits",
                perm.len()
            )));
        }
        check_qubits(perm, n)?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (old, a) in self.amplitudes.iter().enumerate() {
            let new = perm.iter().enumerate().fold(0usize, |acc, (i, &src)| {
                acc | (bit_of(old, src, n) << (n - 1 - i))
            });
            out[new] = *a;
        }
        Ok(Self {
            n_qubits: n,
            amplitudes: out,
        })
    }

    /// `|ψ⟩⟨ψ|` as a dense density matrix.
    pub fn to_density(&self) -> Result<DensityMatrix> {
        if self.n_qubits > MAX_DENSITY_QUBITS {
            return Err(QssError::BudgetExceeded(format!(
                "dense density matrices support at most {MAX_DENSITY_QUBITS} qubits"
            )));
        }
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        Ok(DensityMatrix::from_matrix_unchecked(self.n_qubits, m))
    }

    /// Applies a 2×2 matrix to one qubit (no normalization).
    pub(crate) fn map_qubit(&mut self, qubit: usize, m: [[C64; 2]; 2]) {
        let mask = qubit_mask(qubit, self.n_qubits);
        for i0 in 0..self.dim() {
            if i0 & mask != 0 {
                continue;
            }
            let i1 = i0 | mask;
            let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
            self.amplitudes[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amplitudes[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Projects `qubits[k]` onto the `outcomes[k]` eigenvector of `bases[k]`.
    ///
    /// Returns the branch probability and the renormalized collapsed state.
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
        Outcome::new(outcomes.to_vec())?;
        let mut out = self.clone();
        for ((&q, &axis), &sign) in qubits.iter().zip(bases).zip(outcomes) {
            let e = eigenvector(axis, sign);
            let proj = [
                [e[0] * e[0].conj(), e[0] * e[1].conj()],
                [e[1] * e[0].conj(), e[1] * e[1].conj()],
            ];
            out.map_qubit(q, proj);
        }
        let probability: f64 = out.amplitudes.iter().map(C64::norm_sqr).sum();
        if probability <= ZERO_PROBABILITY {
            return Err(QssError::ZeroProbabilityBranch(probability));
        }
        let norm = probability.sqrt();
        out.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok((probability, out))
    }

    /// Projective measurement of `qubits` in a single basis.
    pub fn project(&self, qubits: &[usize], basis: PauliAxis, outcomes: &[i8]) -> Result<(f64, Self)> {
        self.project_bases(qubits, &vec![basis; qubits.len()], outcomes)
    }

    /// Born distribution of the outcomes on `qubits`, all other qubits
    /// marginalized.
    ///
    /// Entry `k` has bit `j` (from the most significant) equal to 0 when
    /// `qubits[j]` gave `+1`.
    pub fn outcome_distribution(&self, qubits: &[usize], bases: &[PauliAxis]) -> Result<Vec<f64>> {
        check_qubits(qubits, self.n_qubits)?;
        if bases.len() != qubits.len() {
            return Err(QssError::InvalidDimension(format!(
                "{} qubits, {} bases",
                qubits.len(),
                bases.len()
            )));
        }
        let mut rotated = self.clone();
        for (&q, &axis) in qubits.iter().zip(bases) {
            // rows are the bras of the +1 and -1 eigenvectors
            let plus = eigenvector(axis, 1);
            let minus = eigenvector(axis, -1);
            rotated.map_qubit(
                q,
                [
                    [plus[0].conj(), plus[1].conj()],
                    [minus[0].conj(), minus[1].conj()],
                ],
            );
        }
        let split = Split::new(qubits, self.n_qubits);
        Ok(split
            .kept
            .iter()
            .map(|&a| {
                split
                    .traced
                    .iter()
                    .map(|&t| rotated.amplitudes[a | t].norm_sqr())
                    .sum()
            })
            .collect())
    }

    /// Samples a measurement of `qubits` and returns the collapsed state.
    pub fn measure_qubits<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        bases: &[PauliAxis],
        rng: &mut R,
    ) -> Result<(Outcome, Self)> {
        let dist = self.outcome_distribution(qubits, bases)?;
        let outcome = sample_outcome(&dist, qubits.len(), rng)?;
        let (_, collapsed) = self.project_bases(qubits, bases, outcome.values())?;
        Ok((outcome, collapsed))
    }

    /// Measures every qubit, `bases[q]` on qubit `q`.
    pub fn measure<R: Rng + ?Sized>(&self, bases: &[PauliAxis], rng: &mut R) -> Result<(Outcome, Self)> {
        if bases.len() != self.n_qubits {
            return Err(QssError::InvalidDimension(format!(
                "{} bases for {} qubits",
                bases.len(),
                self.n_qubits
            )));
        }
        let all: Vec<usize> = (0..self.n_qubits).collect();
        self.measure_qubits(&all, bases, rng)
    }

    pub fn to_json(&self) -> String {
        let doc = StateDocument {
            n_qubits: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        };
        serde_json::to_string(&doc).expect("state document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StateDocument = serde_json::from_str(text)
            .map_err(|e| QssError::InvalidArgument(format!("state JSON: {e}")))?;
        Self::new(
            doc.n_qubits,
            doc.amplitudes.into_iter().map(|[re, im]| C64::new(re, im)).collect(),
        )
    }
}

/// Draws one outcome tuple from a distribution laid out as by
/// [`PureState::outcome_distribution`].
pub fn sample_outcome<R: Rng + ?Sized>(dist: &[f64], k: usize, rng: &mut R) -> Result<Outcome> {
    if dist.len() != 1 << k {
        return Err(QssError::InvalidDimension(format!(
            "distribution of length {} for {k} qubits",
            dist.len()
        )));
    }
    let r: f64 = rng.random();
    let mut acc = 0.0;
    let mut chosen = None;
    for (i, &p) in dist.iter().enumerate() {
        if p <= ZERO_PROBABILITY {
            continue;
        }
        chosen = Some(i);
        acc += p;
        if r < acc {
            break;
        }
    }
    let chosen = chosen.ok_or(QssError::ZeroProbabilityBranch(0.0))?;
    Ok(Outcome(
        (0..k)
            .map(|j| if (chosen >> (k - 1 - j)) & 1 == 0 { 1 } else { -1 })
            .collect(),
    ))
}

impl QuantumState for PureState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn raw_expectation(&self, pauli: &PauliString) -> C64 {
        let mask = pauli.flip_mask();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| self.amplitudes[i ^ mask].conj() * pauli.phase(i) * a)
            .sum()
    }

    fn check_valid(&self) -> Result<()> {
        Ok(())
    }

    fn expectation(&self, pauli: &PauliString) -> Result<f64> {
        self.check_pauli(pauli)?;
        let value = self.raw_expectation(pauli);
        if value.im.abs() > EXACT_TOL {
            return Err(QssError::InternalInconsistency(format!(
                "Pauli expectation has imaginary part {}",
                value.im
            )));
        }
        Ok(value.re.clamp(-1.0, 1.0))
    }

    fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(QssError::InvalidArgument("empty keep-set".into()));
        }
        check_qubits(keep, self.n_qubits)?;
        if keep.len() > MAX_DENSITY_QUBITS {
            return Err(QssError::BudgetExceeded(format!(
                "reduced state on {} qubits exceeds the dense cap",
                keep.len()
            )));
        }
        let split = Split::new(keep, self.n_qubits);
        let d = split.kept.len();
        let m = DMatrix::from_fn(d, d, |a, b| {
            split
                .traced
                .iter()
                .map(|&t| {
                    self.amplitudes[split.kept[a] | t] * self.amplitudes[split.kept[b] | t].conj()
                })
                .sum()
        });
        Ok(DensityMatrix::from_matrix_unchecked(keep.len(), m))
    }
}
