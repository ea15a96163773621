use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::tensor::correlation_tensor;
use crate::error::{QssError, Result};
use crate::qsim::{DensityMatrix, PauliAxis, C64};
use crate::states::{add_white_noise, g_state, ghz_state};

fn check_n(n: usize) -> Result<()> {
    if n < 4 {
        return Err(QssError::InvalidArgument(format!("need n >= 4, got {n}")));
    }
    Ok(())
}

/// Werner visibility of the two-qubit state left after projecting all but two
/// parties of `p·G_n + (1 − p)·I/2^n` onto a common σ_z eigenstate.
pub fn collapse_visibility(n: usize, p: f64) -> Result<f64> {
    check_n(n)?;
    if !(p > 0.0 && p <= 1.0) {
        return Err(QssError::InvalidArgument(format!(
            "visibility {p} outside (0,1]; at 0 the projected state carries no G component"
        )));
    }
    let nf = n as f64;
    Ok(1.0 / (1.0 + (1.0 - p) * nf / (p * 2f64.powi(n as i32 - 2))))
}

/// Smallest G_n visibility whose collapsed pair still violates CHSH.
pub fn crit_noise_g(n: usize) -> Result<f64> {
    check_n(n)?;
    let nf = n as f64;
    Ok(nf / (nf + (2f64.sqrt() - 1.0) * 2f64.powi(n as i32 - 2)))
}

/// Smallest GHZ_n visibility that violates the Mermin-type inequality.
pub fn crit_noise_ghz(n: usize) -> Result<f64> {
    check_n(n)?;
    Ok(1.0 / 2f64.powi(n as i32 - 1).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub p_crit_g: f64,
    pub q_crit_ghz: f64,
    /// The G family tolerates more white noise (smaller critical visibility).
    pub g_more_robust: bool,
}

pub fn crossover_scan(n_min: usize, n_max: usize) -> Result<Vec<ThresholdReport>> {
    check_n(n_min)?;
    if n_max < n_min {
        return Err(QssError::InvalidArgument(format!("empty range {n_min}..={n_max}")));
    }
    (n_min..=n_max)
        .map(|n| {
            let p_crit_g = crit_noise_g(n)?;
            let q_crit_ghz = crit_noise_ghz(n)?;
            Ok(ThresholdReport {
                n,
                p_crit_g,
                q_crit_ghz,
                g_more_robust: p_crit_g < q_crit_ghz,
            })
        })
        .collect()
}

/// Two-qubit state produced by the exact projection, with its Werner fit.
#[derive(Clone, Debug)]
pub struct WernerFit {
    pub state: DensityMatrix,
    pub probability: f64,
    pub visibility: f64,
    /// Largest entrywise deviation from `v·|G_2⟩⟨G_2| + (1 − v)·I/4`.
    pub residual: f64,
}

/// Projects qubits `2..n` of noisy G_n onto `|0…0⟩` (or `|1…1⟩` when
/// `all_ones`) and fits the remaining pair to the Werner form.
pub fn projected_werner_fit(n: usize, p: f64, all_ones: bool) -> Result<WernerFit> {
    check_n(n)?;
    let noisy = add_white_noise(&g_state(n)?, p)?.realized;
    let rest: Vec<usize> = (2..n).collect();
    let sign = if all_ones { -1 } else { 1 };
    let (probability, post) = noisy.project(&rest, PauliAxis::Z, &vec![sign; rest.len()])?;
    let state = post.partial_trace(&[0, 1])?;
    let g2 = g_state(2)?;
    let overlap = state.fidelity_with(&g2)?;
    let visibility = (4.0 * overlap - 1.0) / 3.0;
    let werner = werner_matrix(visibility);
    let residual = state
        .matrix()
        .iter()
        .zip(werner.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(WernerFit {
        state,
        probability,
        visibility,
        residual,
    })
}

fn werner_matrix(v: f64) -> DMatrix<C64> {
    let mut m = DMatrix::from_diagonal_element(4, 4, C64::new((1.0 - v) / 4.0, 0.0));
    for (a, b) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        m[(a, b)] += C64::new(v / 2.0, 0.0);
    }
    m
}

/// Largest six-party visibilities certified local by the two-setting sum in
/// the fixed frame: `(p_G6, q_GHZ6)`, each the root of `plane_sum·p² = 1`.
pub fn lr_sufficiency_thresholds() -> Result<(f64, f64)> {
    let g = correlation_tensor(&g_state(6)?)?.plane_sum(None)?;
    let ghz = correlation_tensor(&ghz_state(6)?)?.plane_sum(None)?;
    Ok((1.0 / g.sqrt(), 1.0 / ghz.sqrt()))
}

/// Same bound for G_6 valid in every frame, from the rotation-invariant sum.
pub fn g6_any_frame_threshold() -> Result<f64> {
    Ok(1.0 / correlation_tensor(&g_state(6)?)?.full_sum().sqrt())
}
