//! Dense simulation primitives for small multiqubit systems.
//!
//! Qubit `0` is the most significant bit of an amplitude index. All
//! operations are pure: they take their inputs by reference and return new
//! values, and randomness is always threaded through an explicit generator.

mod density;
mod linalg;
mod pauli;
mod state;

pub use density::DensityMatrix;
pub use linalg::{hermitian_eigenvalues, is_hermitian};
pub use pauli::{PauliAxis, PauliString};
pub use state::{sample_outcome, PureState};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// Complex amplitude type used throughout.
pub type C64 = Complex64;

/// Tolerance for identities that hold in exact arithmetic.
pub const EXACT_TOL: f64 = 1e-10;
/// Tolerance for eigen-decompositions.
pub const EIGEN_TOL: f64 = 1e-8;
/// Branches below this probability are treated as exactly zero.
pub const ZERO_PROBABILITY: f64 = 1e-12;
/// Largest register simulated as a statevector.
pub const MAX_STATEVECTOR_QUBITS: usize = 20;
/// Largest register simulated as a dense density matrix.
pub const MAX_DENSITY_QUBITS: usize = 12;

/// The seedable generator every stochastic routine takes.
pub type QssRng = ChaCha8Rng;

/// A generator for an independent stream derived from a master seed.
///
/// Streams with different indices never overlap, so per-round or per-restart
/// generators can be created in any order (or in parallel) with identical
/// results.
pub fn stream_rng(seed: u64, stream: u64) -> QssRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Per-qubit ±1 measurement results.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Outcome(pub Vec<i8>);

impl Outcome {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.iter().any(|&v| v != 1 && v != -1) {
            return Err(crate::QssError::InvalidArgument(format!(
                "outcomes must be +1 or -1, got {values:?}"
            )));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product of all entries.
    pub fn parity(&self) -> i8 {
        self.0.iter().product()
    }
}

/// Common interface of pure and mixed states.
pub trait QuantumState {
    fn n_qubits(&self) -> usize;

    /// `⟨P⟩` for a Pauli string on all qubits.
    fn expectation(&self, pauli: &PauliString) -> Result<f64>;

    /// Reduced state on `keep`, in the order given.
    fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix>;

    /// `tr(ρP)` with no dimension, Hermiticity or reality checks; callers
    /// evaluating many strings validate once up front.
    fn raw_expectation(&self, pauli: &PauliString) -> C64;

    /// Structural checks that [`QuantumState::raw_expectation`] skips.
    fn check_valid(&self) -> Result<()>;
}

/// Bit of `qubit` within a basis index on `n` qubits.
#[inline]
pub(crate) fn bit_of(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

#[inline]
pub(crate) fn qubit_mask(qubit: usize, n: usize) -> usize {
    1 << (n - 1 - qubit)
}

/// Validates a list of distinct in-range qubit indices.
pub(crate) fn check_qubits(qubits: &[usize], n: usize) -> Result<()> {
    let mut seen = 0usize;
    for &q in qubits {
        if q >= n {
            return Err(crate::QssError::InvalidDimension(format!(
                "qubit {q} out of range for {n} qubits"
            )));
        }
        if seen & (1 << q) != 0 {
            return Err(crate::QssError::InvalidArgument(format!(
                "qubit {q} listed twice"
            )));
        }
        seen |= 1 << q;
    }
    Ok(())
}

/// Index-scatter tables for splitting an index into kept and traced parts.
///
/// `kept[a] | traced[t]` is the full index whose kept qubits (in `keep` order)
/// encode `a` and whose remaining qubits (in ascending order) encode `t`.
pub(crate) struct Split {
    pub kept: Vec<usize>,
    pub traced: Vec<usize>,
}

impl Split {
    pub fn new(keep: &[usize], n: usize) -> Self {
        let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        Self {
            kept: scatter_table(keep, n),
            traced: scatter_table(&rest, n),
        }
    }
}

fn scatter_table(qubits: &[usize], n: usize) -> Vec<usize> {
    let k = qubits.len();
    (0..1usize << k)
        .map(|a| {
            qubits.iter().enumerate().fold(0, |acc, (pos, &q)| {
                if (a >> (k - 1 - pos)) & 1 == 1 {
                    acc | qubit_mask(q, n)
                } else {
                    acc
                }
            })
        })
        .collect()
}

/// Eigenvector of `axis` with eigenvalue `sign`, as `[⟨0|e⟩, ⟨1|e⟩]`.
pub(crate) fn eigenvector(axis: PauliAxis, sign: i8) -> [C64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = f64::from(sign);
    match axis {
        PauliAxis::Z => {
            if sign > 0 {
                [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
            } else {
                [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
            }
        }
        PauliAxis::X => [C64::new(h, 0.0), C64::new(s * h, 0.0)],
        PauliAxis::Y => [C64::new(h, 0.0), C64::new(0.0, s * h)],
    }
}
