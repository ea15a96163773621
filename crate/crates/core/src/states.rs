//! Constructors for the named carrier states and their white-noise mixtures.
//!
//! Every constructor returns real, non-negative amplitudes, so equality tests
//! between states never have to deal with a global phase.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result};
use crate::qsim::{DensityMatrix, PureState, QuantumState};

/// Which entangled state carries the shared key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CarrierFamily {
    /// The equal superposition of W and W̄.
    G,
    Ghz,
}

impl fmt::Display for CarrierFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CarrierFamily::G => write!(f, "g"),
            CarrierFamily::Ghz => write!(f, "ghz"),
        }
    }
}

impl FromStr for CarrierFamily {
    type Err = QssError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "g" => Ok(CarrierFamily::G),
            "ghz" => Ok(CarrierFamily::Ghz),
            other => Err(QssError::InvalidArgument(format!("unknown carrier '{other}'"))),
        }
    }
}

fn require_at_least(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(QssError::InvalidArgument(format!(
            "{what} needs at least {min} qubits, got {n}"
        )));
    }
    Ok(())
}

fn single_excitations(n: usize) -> impl Iterator<Item = usize> {
    (0..n).map(move |q| 1usize << (n - 1 - q))
}

fn all_ones(n: usize) -> usize {
    (1usize << n) - 1
}

/// Index with every bit flipped.
fn complement(index: usize, n: usize) -> usize {
    index ^ all_ones(n)
}

/// `|W_n⟩`: equal superposition of the `n` single-excitation basis states.
pub fn w_state(n: usize) -> Result<PureState> {
    require_at_least(n, 2, "W state")?;
    let idx: Vec<usize> = single_excitations(n).collect();
    PureState::uniform_superposition(n, &idx)
}

/// `|W̄_n⟩`: the single-hole counterpart of `|W_n⟩`.
pub fn wbar_state(n: usize) -> Result<PureState> {
    require_at_least(n, 2, "W-bar state")?;
    let idx: Vec<usize> = single_excitations(n).map(|i| complement(i, n)).collect();
    PureState::uniform_superposition(n, &idx)
}

/// `|G_n⟩ = (|W_n⟩ + |W̄_n⟩)/√2`.
///
/// For `n = 2` the two W states coincide; the Bell state
/// `(|01⟩ + |10⟩)/√2` is returned instead.
pub fn g_state(n: usize) -> Result<PureState> {
    require_at_least(n, 2, "G state")?;
    let mut idx: Vec<usize> = single_excitations(n).collect();
    idx.extend(single_excitations(n).map(|i| complement(i, n)));
    idx.sort_unstable();
    idx.dedup();
    PureState::uniform_superposition(n, &idx)
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz_state(n: usize) -> Result<PureState> {
    require_at_least(n, 2, "GHZ state")?;
    PureState::uniform_superposition(n, &[0, all_ones(n)])
}

/// The carrier of the given family on `n` qubits.
pub fn carrier_state(family: CarrierFamily, n: usize) -> Result<PureState> {
    match family {
        CarrierFamily::G => g_state(n),
        CarrierFamily::Ghz => ghz_state(n),
    }
}

/// Single excitations plus the all-ones string on `k` qubits, and the
/// bit-flipped partner.
fn excitation_pair(k: usize) -> Result<(PureState, PureState)> {
    let mut idx: Vec<usize> = single_excitations(k).collect();
    idx.push(all_ones(k));
    idx.sort_unstable();
    idx.dedup();
    let flipped: Vec<usize> = idx.iter().map(|&i| complement(i, k)).collect();
    Ok((
        PureState::uniform_superposition(k, &idx)?,
        PureState::uniform_superposition(k, &flipped)?,
    ))
}

/// `(|ξ⟩, |ξ̄⟩)` on `2m − 1` qubits: the Bobs' conditional states after
/// Alice measures her share of `|G_{2m}⟩`.
pub fn xi_states(m: usize) -> Result<(PureState, PureState)> {
    if m < 1 {
        return Err(QssError::InvalidArgument("xi states need m >= 1".into()));
    }
    excitation_pair(2 * m - 1)
}

/// `(|v_0⟩, |v_1⟩)` on `n − 1` qubits, with
/// `|G_n⟩ = (|v_0⟩|0⟩ + |v_1⟩|1⟩)/√2` over the last qubit.
///
/// The pair is orthogonal for `n ≥ 4`; at `n = 3` the supports overlap.
pub fn v_states(n: usize) -> Result<(PureState, PureState)> {
    require_at_least(n, 3, "v states")?;
    excitation_pair(n - 1)
}

/// Sign linking Alice's result to the product of the Bobs' results when all
/// `2m` parties measure `axis` on the carrier: `⟨σ_axis^{⊗2m}⟩`.
///
/// Only the protocol bases `X` and `Y` are meaningful.
pub fn parity_sign(family: CarrierFamily, m: usize, axis: crate::qsim::PauliAxis) -> Result<i8> {
    use crate::qsim::PauliAxis;
    if m < 1 {
        return Err(QssError::InvalidArgument("parity needs m >= 1".into()));
    }
    let odd_m = m % 2 == 1;
    match (axis, family) {
        (PauliAxis::X, _) => Ok(1),
        // (-1)^{m+1}
        (PauliAxis::Y, CarrierFamily::G) => Ok(if odd_m { 1 } else { -1 }),
        // (-1)^m
        (PauliAxis::Y, CarrierFamily::Ghz) => Ok(if odd_m { -1 } else { 1 }),
        (PauliAxis::Z, _) => Err(QssError::InvalidArgument(
            "the protocol only uses X and Y".into(),
        )),
    }
}

/// `p·|ψ⟩⟨ψ| + (1 − p)·I/2^n`.
#[derive(Clone, Debug)]
pub struct NoisyState {
    pub base: PureState,
    pub visibility: f64,
    pub realized: DensityMatrix,
}

pub fn add_white_noise(state: &PureState, p: f64) -> Result<NoisyState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(QssError::InvalidArgument(format!(
            "visibility {p} outside [0,1]"
        )));
    }
    let pure = state.to_density()?;
    let noise = DensityMatrix::maximally_mixed(state.n_qubits())?;
    Ok(NoisyState {
        base: state.clone(),
        visibility: p,
        realized: pure.mix(p, &noise)?,
    })
}
