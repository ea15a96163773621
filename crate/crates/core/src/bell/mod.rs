//! Local-realism analysis.
//!
//! - [`two_qubit`]: the 3×3 correlation matrix and the CHSH-violation
//!   measure `M(ρ)` (sum of the two largest eigenvalues of `TᵀT`).
//! - [`tensor`]: full N-party correlation tensors and their squared sums.
//! - [`frame`]: local measurement planes and a search for the plane choice
//!   that maximizes the two-setting sum.
//! - [`noise`]: white-noise visibilities after collapse and the critical
//!   admixtures of the G and GHZ families.

pub mod frame;
pub mod noise;
pub mod tensor;
pub mod two_qubit;

pub use frame::{maximize_plane_sum, FrameSearch, LocalFrame, DEFAULT_RESTARTS};
pub use noise::{
    collapse_visibility, crit_noise_g, crit_noise_ghz, crossover_scan, g6_any_frame_threshold,
    lr_sufficiency_thresholds, projected_werner_fit, ThresholdReport, WernerFit,
};
pub use tensor::{correlation_tensor, CorrelationTensor, MAX_TENSOR_QUBITS};
pub use two_qubit::{chsh_max, correlation_matrix_2q, horodecki_m};

use serde::{Deserialize, Serialize};

/// Reading of a two-setting sum against the local-realism sufficiency bound.
///
/// A sum at or below 1 certifies a local realistic model for the two-setting
/// correlations in that frame. A larger sum only says that certificate is
/// unavailable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZbVerdict {
    LrSufficient,
    TwoSettingCriterionExceeded,
}

impl ZbVerdict {
    pub fn from_sum(sum: f64) -> Self {
        if sum <= 1.0 {
            ZbVerdict::LrSufficient
        } else {
            ZbVerdict::TwoSettingCriterionExceeded
        }
    }
}
