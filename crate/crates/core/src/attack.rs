//! The coherent individual attack on the Bobs' register.
//!
//! After Alice measures, the Bobs hold a superposition of two orthogonal
//! branch states (`|ξ⟩, |ξ̄⟩` for the G carrier, `|0…0⟩, |1…1⟩` for GHZ).
//! Evan couples a single probe qubit to that two-dimensional span. The
//! isometry is only ever applied inside the span, so no completion to a full
//! unitary is needed.
//!
//! Register layout of a [`TripartiteState`]: Alice is qubit 0, the Bobs are
//! qubits `1..2m`, Evan's probe is qubit `2m`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result};
use crate::qsim::{DensityMatrix, PauliAxis, PureState, QuantumState, C64};
use crate::states::{self, CarrierFamily};

/// Angles this close outside `[0, π/2]` are clamped instead of rejected.
const ANGLE_SLACK: f64 = 1e-12;

pub(crate) fn check_angle(phi: f64) -> Result<f64> {
    if !phi.is_finite() || !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&phi) {
        return Err(QssError::InvalidArgument(format!(
            "attack angle {phi} outside [0, pi/2]"
        )));
    }
    Ok(phi.clamp(0.0, FRAC_PI_2))
}

/// Carrier, size (`2m` parties) and attack angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackScenario {
    pub carrier: CarrierFamily,
    pub m: usize,
    pub phi: f64,
}

impl AttackScenario {
    pub fn new(carrier: CarrierFamily, m: usize, phi: f64) -> Result<Self> {
        if m < 1 {
            return Err(QssError::InvalidArgument("scenario needs m >= 1".into()));
        }
        if 2 * m + 1 > crate::qsim::MAX_STATEVECTOR_QUBITS {
            return Err(QssError::BudgetExceeded(format!("m = {m} is too large")));
        }
        Ok(Self {
            carrier,
            m,
            phi: check_angle(phi)?,
        })
    }

    /// The honest run.
    pub fn unattacked(carrier: CarrierFamily, m: usize) -> Result<Self> {
        Self::new(carrier, m, 0.0)
    }

    pub fn n_parties(&self) -> usize {
        2 * self.m
    }

    pub fn n_bobs(&self) -> usize {
        2 * self.m - 1
    }
}

/// One of the two branch states of the Bobs' register.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `|ξ⟩` (or `|0…0⟩` for GHZ); paired with Alice's `|0⟩`.
    Xi,
    /// `|ξ̄⟩` (or `|1…1⟩` for GHZ); paired with Alice's `|1⟩`.
    XiBar,
}

/// Image of `|branch⟩|0⟩_E` in the basis `{|ξ⟩|0⟩, |ξ̄⟩|0⟩, |ξ⟩|1⟩}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchImage {
    pub xi_probe0: f64,
    pub xibar_probe0: f64,
    pub xi_probe1: f64,
}

impl BranchImage {
    pub fn norm_sqr(&self) -> f64 {
        self.xi_probe0.powi(2) + self.xibar_probe0.powi(2) + self.xi_probe1.powi(2)
    }
}

/// `|ξ⟩|0⟩ ↦ |ξ⟩|0⟩`, `|ξ̄⟩|0⟩ ↦ cos φ |ξ̄⟩|0⟩ + sin φ |ξ⟩|1⟩`.
pub fn evan_unitary_action(branch: Branch, phi: f64) -> Result<BranchImage> {
    let phi = check_angle(phi)?;
    Ok(match branch {
        Branch::Xi => BranchImage {
            xi_probe0: 1.0,
            xibar_probe0: 0.0,
            xi_probe1: 0.0,
        },
        Branch::XiBar => BranchImage {
            xi_probe0: 0.0,
            xibar_probe0: phi.cos(),
            xi_probe1: phi.sin(),
        },
    })
}

/// The two branch states of the Bobs' register for a carrier on `2m` qubits.
pub fn bob_branches(carrier: CarrierFamily, m: usize) -> Result<(PureState, PureState)> {
    match carrier {
        CarrierFamily::G => states::xi_states(m),
        CarrierFamily::Ghz => {
            let k = 2 * m - 1;
            Ok((
                PureState::basis(k, &"0".repeat(k))?,
                PureState::basis(k, &"1".repeat(k))?,
            ))
        }
    }
}

/// Alice, the Bobs and Evan's probe after the attack.
#[derive(Clone, Debug)]
pub struct TripartiteState {
    psi: PureState,
    scenario: AttackScenario,
}

/// Which all-equal outcome pattern the measuring Bobs post-select on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CollapsePattern {
    /// Every measuring Bob obtains `+1` (`|0⟩` in z, `|+x⟩` in x).
    AllPlus,
    /// Every measuring Bob obtains `−1`.
    AllMinus,
}

impl CollapsePattern {
    fn sign(self) -> i8 {
        match self {
            CollapsePattern::AllPlus => 1,
            CollapsePattern::AllMinus => -1,
        }
    }
}

/// Applies the attack to the carrier with Evan's probe in `|0⟩`.
pub fn attacked_state(scenario: &AttackScenario) -> Result<TripartiteState> {
    let (xi, xibar) = bob_branches(scenario.carrier, scenario.m)?;
    let alice = [PureState::basis(1, "0")?, PureState::basis(1, "1")?];
    let probe = [PureState::basis(1, "0")?, PureState::basis(1, "1")?];
    let n = 2 * scenario.m + 1;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    let mut add = |a: &PureState, bobs: &PureState, e: &PureState, weight: f64| -> Result<()> {
        if weight == 0.0 {
            return Ok(());
        }
        let term = a.tensor(bobs)?.tensor(e)?;
        for (acc, t) in amps.iter_mut().zip(term.amplitudes()) {
            *acc += t * (weight * FRAC_1_SQRT_2);
        }
        Ok(())
    };
    for (a, branch) in [(0, Branch::Xi), (1, Branch::XiBar)] {
        let image = evan_unitary_action(branch, scenario.phi)?;
        add(&alice[a], &xi, &probe[0], image.xi_probe0)?;
        add(&alice[a], &xibar, &probe[0], image.xibar_probe0)?;
        add(&alice[a], &xi, &probe[1], image.xi_probe1)?;
    }
    Ok(TripartiteState {
        psi: PureState::new(n, amps)?,
        scenario: *scenario,
    })
}

impl TripartiteState {
    pub fn psi(&self) -> &PureState {
        &self.psi
    }

    pub fn scenario(&self) -> &AttackScenario {
        &self.scenario
    }

    pub fn alice(&self) -> usize {
        0
    }

    pub fn bobs(&self) -> Vec<usize> {
        (1..2 * self.scenario.m).collect()
    }

    pub fn evan(&self) -> usize {
        2 * self.scenario.m
    }

    /// Alice and all Bobs, Evan traced out.
    pub fn rho_ab(&self) -> Result<DensityMatrix> {
        self.psi.reduced(&(0..2 * self.scenario.m).collect::<Vec<_>>())
    }

    /// Alice (qubit 0) and Evan (qubit 1), Bobs traced out.
    pub fn rho_ae(&self) -> Result<DensityMatrix> {
        self.psi.reduced(&[self.alice(), self.evan()])
    }

    /// The Bobs alone.
    pub fn rho_b(&self) -> Result<DensityMatrix> {
        self.psi.reduced(&self.bobs())
    }

    /// Basis in which the other Bobs measure before the pair is examined.
    pub fn collapse_basis(&self) -> PauliAxis {
        match self.scenario.carrier {
            CarrierFamily::G => PauliAxis::Z,
            CarrierFamily::Ghz => PauliAxis::X,
        }
    }

    /// Post-selects every Bob except `kept_bob` (0-based among the Bobs) on
    /// an all-equal pattern and returns the state of Alice and that Bob.
    pub fn coalition_collapse(
        &self,
        kept_bob: usize,
        pattern: CollapsePattern,
    ) -> Result<DensityMatrix> {
        let n_bobs = self.scenario.n_bobs();
        if kept_bob >= n_bobs {
            return Err(QssError::InvalidArgument(format!(
                "bob {kept_bob} out of range for {n_bobs} bobs"
            )));
        }
        let kept_qubit = 1 + kept_bob;
        let measured: Vec<usize> = self.bobs().into_iter().filter(|&q| q != kept_qubit).collect();
        let collapsed = if measured.is_empty() {
            self.psi.clone()
        } else {
            let outcomes = vec![pattern.sign(); measured.len()];
            self.psi.project(&measured, self.collapse_basis(), &outcomes)?.1
        };
        collapsed.reduced(&[self.alice(), kept_qubit])
    }

    /// Exact joint distribution of Alice's result and the Bobs' results when
    /// all `2m` parties measure `basis`; Evan's probe is marginalized.
    pub fn joint_distribution(&self, basis: PauliAxis) -> Result<Vec<f64>> {
        let parties: Vec<usize> = (0..2 * self.scenario.m).collect();
        self.psi
            .outcome_distribution(&parties, &vec![basis; parties.len()])
    }

    /// `I(A : B)` in bits from the exact distribution for one basis, with the
    /// full tuple of Bob results as the second variable.
    pub fn exact_mutual_info(&self, basis: PauliAxis) -> Result<f64> {
        let dist = self.joint_distribution(basis)?;
        let bob_outcomes = dist.len() / 2;
        let p_alice = [
            dist[..bob_outcomes].iter().sum::<f64>(),
            dist[bob_outcomes..].iter().sum::<f64>(),
        ];
        let p_bobs: Vec<f64> = (0..bob_outcomes)
            .map(|b| dist[b] + dist[bob_outcomes + b])
            .collect();
        Ok(shannon_entropy(&p_alice)? + shannon_entropy(&p_bobs)? - shannon_entropy(&dist)?)
    }

    /// Sifted-round mutual information: the average of the x and y values.
    pub fn exact_mutual_info_ab(&self) -> Result<f64> {
        Ok(0.5 * (self.exact_mutual_info(PauliAxis::X)? + self.exact_mutual_info(PauliAxis::Y)?))
    }

    /// Probability that Alice's result disagrees with the sign-corrected
    /// product of the Bobs' results in a sifted `basis` round.
    pub fn exact_qber(&self, basis: PauliAxis) -> Result<f64> {
        let sign = states::parity_sign(self.scenario.carrier, self.scenario.m, basis)?;
        let dist = self.joint_distribution(basis)?;
        Ok(dist
            .iter()
            .enumerate()
            .filter(|(idx, _)| {
                // outcome bit 1 encodes -1; the full product is (-1)^popcount
                let parity = if idx.count_ones() % 2 == 0 { 1 } else { -1 };
                parity != sign
            })
            .map(|(_, p)| *p)
            .sum::<f64>()
            .min(1.0))
    }
}

/// `H(p) = −p log₂ p − (1−p) log₂(1−p)`, with `0·log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p) {
        return Err(QssError::InvalidArgument(format!("probability {p} outside [0,1]")));
    }
    let p = p.clamp(0.0, 1.0);
    Ok(plogp(p) + plogp(1.0 - p))
}

fn plogp(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Shannon entropy in bits of a probability vector.
pub fn shannon_entropy(dist: &[f64]) -> Result<f64> {
    if dist.is_empty() {
        return Err(QssError::InvalidArgument("empty distribution".into()));
    }
    let total: f64 = dist.iter().sum();
    if dist.iter().any(|&p| p < -1e-9 || !p.is_finite()) || (total - 1.0).abs() > 1e-9 {
        return Err(QssError::InvalidArgument(format!(
            "not a probability vector (sum {total})"
        )));
    }
    Ok(dist.iter().map(|&p| plogp(p.max(0.0))).sum())
}

/// `I(A:B) = 1 − H((1 + cos φ)/2)`.
pub fn mutual_info_ab(phi: f64) -> Result<f64> {
    let phi = check_angle(phi)?;
    Ok(1.0 - binary_entropy((1.0 + phi.cos()) / 2.0)?)
}

/// `I(A:E)`, the Alice–Bob expression at `π/2 − φ`.
pub fn mutual_info_ae(phi: f64) -> Result<f64> {
    let phi = check_angle(phi)?;
    mutual_info_ab(FRAC_PI_2 - phi)
}

/// Error rate of a sifted x-round: `(1 − cos φ)/2`.
pub fn qber_x(phi: f64) -> Result<f64> {
    let phi = check_angle(phi)?;
    Ok((1.0 - phi.cos()) / 2.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub phi: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub margin: f64,
    pub secure: bool,
}

/// Evaluates `I(A:B) > I(A:E)` for the scenario.
///
/// The closed forms do not depend on the carrier: both carriers reduce to
/// the same two-branch structure.
pub fn security_report(scenario: &AttackScenario) -> Result<SecurityReport> {
    let i_ab = mutual_info_ab(scenario.phi)?;
    let i_ae = mutual_info_ae(scenario.phi)?;
    let margin = i_ab - i_ae;
    Ok(SecurityReport {
        phi: scenario.phi,
        i_ab,
        i_ae,
        margin,
        secure: margin > 0.0,
    })
}

/// Bisects `f` on `[lo, hi]` given opposite signs at the ends.
pub(crate) fn bisect(mut f: impl FnMut(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo.signum() == f_hi.signum() {
        return Err(QssError::InvalidArgument(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Angle at which `I(A:B) − I(A:E)` changes sign, located by bisection.
pub fn security_crossing(tol: f64) -> Result<f64> {
    bisect(
        |phi| Ok(mutual_info_ab(phi)? - mutual_info_ae(phi)?),
        0.0,
        FRAC_PI_2,
        tol,
    )
}

/// One grid point of an attack sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub phi: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub margin: f64,
    /// Sifted x-round error rate from the exact joint distribution.
    pub qber: f64,
    pub horodecki_ab: f64,
    pub horodecki_ae: f64,
}

pub fn sweep_row(scenario: &AttackScenario) -> Result<SweepRow> {
    let report = security_report(scenario)?;
    let state = attacked_state(scenario)?;
    Ok(SweepRow {
        phi: scenario.phi,
        i_ab: report.i_ab,
        i_ae: report.i_ae,
        margin: report.margin,
        qber: state.exact_qber(PauliAxis::X)?,
        horodecki_ab: crate::bell::horodecki_m(&state.coalition_collapse(0, CollapsePattern::AllPlus)?)?,
        horodecki_ae: crate::bell::horodecki_m(&state.rho_ae()?)?,
    })
}

/// Sweep over `grid`, one row per angle, in grid order.
pub fn attack_sweep(carrier: CarrierFamily, m: usize, grid: &[f64]) -> Result<Vec<SweepRow>> {
    grid.iter()
        .map(|&phi| sweep_row(&AttackScenario::new(carrier, m, phi)?))
        .collect()
}

/// Reference crossing angle.
pub const CROSSING_ANGLE: f64 = FRAC_PI_4;

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pure_pair(a: [f64; 4]) -> DensityMatrix {
        PureState::from_unnormalized(2, a.iter().map(|&x| C64::new(x, 0.0)).collect())
            .unwrap()
            .to_density()
            .unwrap()
    }

    /// `w·|u⟩⟨u| + (1−w)·|b⟩⟨b|` with `u` unnormalized-then-normalized.
    fn two_term(w: f64, u: [f64; 4], basis_bits: &str) -> DensityMatrix {
        let b = PureState::basis(2, basis_bits).unwrap().to_density().unwrap();
        pure_pair(u).mix(w, &b).unwrap()
    }

    #[test]
    fn isometry_endpoints_and_norms() {
        let id = evan_unitary_action(Branch::XiBar, 0.0).unwrap();
        assert_eq!((id.xibar_probe0, id.xi_probe1), (1.0, 0.0));
        let full = evan_unitary_action(Branch::XiBar, FRAC_PI_2).unwrap();
        assert!(full.xibar_probe0.abs() < 1e-16 && full.xi_probe1 == 1.0);
        for k in 0..=20 {
            let phi = k as f64 * FRAC_PI_2 / 20.0;
            for b in [Branch::Xi, Branch::XiBar] {
                assert!((evan_unitary_action(b, phi).unwrap().norm_sqr() - 1.0).abs() < 1e-15);
            }
        }
        assert!(evan_unitary_action(Branch::Xi, 2.0).is_err());
        assert!(evan_unitary_action(Branch::Xi, -0.1).is_err());
    }

    #[test]
    fn unattacked_state_is_carrier_times_probe() {
        for m in 1..=3 {
            for (carrier, state) in [
                (CarrierFamily::G, states::g_state(2 * m).unwrap()),
                (CarrierFamily::Ghz, states::ghz_state(2 * m).unwrap()),
            ] {
                let t = attacked_state(&AttackScenario::unattacked(carrier, m).unwrap()).unwrap();
                let expected = state.tensor(&PureState::basis(1, "0").unwrap()).unwrap();
                assert!(t.psi().max_abs_diff(&expected).unwrap() < 1e-15);
            }
        }
    }

    #[test]
    fn rho_ab_has_closed_form_weights() {
        let phi = FRAC_PI_4;
        let t = attacked_state(&AttackScenario::new(CarrierFamily::G, 2, phi).unwrap()).unwrap();
        let ev = t.rho_ab().unwrap().eigenvalues().unwrap();
        assert!((ev[0] - 0.75).abs() < 1e-10);
        assert!((ev[1] - 0.25).abs() < 1e-10);
        assert!(ev[2].abs() < 1e-10);
    }

    #[test]
    fn rho_b_matches_closed_form() {
        for phi in [0.0, 0.3, 1.1, FRAC_PI_2] {
            let t = attacked_state(&AttackScenario::new(CarrierFamily::G, 3, phi).unwrap()).unwrap();
            let (xi, xibar) = states::xi_states(3).unwrap();
            let w = (1.0 + phi.sin().powi(2)) / 2.0;
            let expected = xi
                .to_density()
                .unwrap()
                .mix(w, &xibar.to_density().unwrap())
                .unwrap();
            assert!(t.rho_b().unwrap().max_abs_diff(&expected).unwrap() < 1e-10);
        }
    }

    #[test]
    fn rho_ae_matches_closed_form() {
        for phi in [0.0, 0.4, FRAC_PI_4, 1.3] {
            for carrier in [CarrierFamily::G, CarrierFamily::Ghz] {
                let t = attacked_state(&AttackScenario::new(carrier, 2, phi).unwrap()).unwrap();
                let (s, c) = phi.sin_cos();
                let expected = two_term((1.0 + s * s) / 2.0, [1.0, 0.0, 0.0, s], "10");
                assert!(t.rho_ae().unwrap().max_abs_diff(&expected).unwrap() < 1e-10);
                let _ = c;
            }
        }
        let t = attacked_state(&AttackScenario::unattacked(CarrierFamily::G, 2).unwrap()).unwrap();
        let expected = two_term(0.5, [1.0, 0.0, 0.0, 0.0], "10");
        assert!(t.rho_ae().unwrap().max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn coalition_collapse_matches_closed_form_for_g() {
        for phi in [0.0, 0.5, FRAC_PI_4, 1.2, FRAC_PI_2] {
            let c = phi.cos();
            // ((1+c²)/2)|β⟩⟨β| + (s²/2)|11⟩⟨11|, β ∝ |01⟩ + c|10⟩
            let expected = two_term((1.0 + c * c) / 2.0, [0.0, 1.0, c, 0.0], "11");
            for m in 2..=3 {
                let t = attacked_state(&AttackScenario::new(CarrierFamily::G, m, phi).unwrap()).unwrap();
                for kept in 0..2 * m - 1 {
                    for pattern in [CollapsePattern::AllPlus, CollapsePattern::AllMinus] {
                        let rho = t.coalition_collapse(kept, pattern).unwrap();
                        assert!(rho.max_abs_diff(&expected).unwrap() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn unattacked_collapse_is_pure_bell_pair() {
        let t = attacked_state(&AttackScenario::unattacked(CarrierFamily::G, 3).unwrap()).unwrap();
        let rho = t.coalition_collapse(2, CollapsePattern::AllPlus).unwrap();
        assert!(rho.max_abs_diff(&pure_pair([0.0, 1.0, 1.0, 0.0])).unwrap() < 1e-12);
        assert!(t.coalition_collapse(5, CollapsePattern::AllPlus).is_err());
    }

    #[test]
    fn entropy_values() {
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // -0.75 log2 0.75 - 0.25 log2 0.25
        assert!((binary_entropy(0.75).unwrap() - 0.811_278_124_459_132_9).abs() < 1e-12);
        assert!(binary_entropy(1.5).is_err());
        assert!(shannon_entropy(&[0.5, 0.6]).is_err());
        assert!((shannon_entropy(&[0.25; 4]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_endpoints() {
        assert!((mutual_info_ab(0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(mutual_info_ae(0.0).unwrap().abs() < 1e-15);
        assert!(mutual_info_ab(FRAC_PI_2).unwrap().abs() < 1e-15);
        let at_quarter = mutual_info_ab(FRAC_PI_4).unwrap();
        assert!((at_quarter - mutual_info_ae(FRAC_PI_4).unwrap()).abs() < 1e-15);
        assert!((at_quarter - 0.399_123_963_307_143_8).abs() < 1e-12);
    }

    #[test]
    fn security_boundary() {
        let report = |phi| {
            security_report(&AttackScenario::new(CarrierFamily::G, 2, phi).unwrap()).unwrap()
        };
        assert!(report(PI / 8.0).secure);
        let b = report(FRAC_PI_4);
        assert!(!b.secure && b.margin.abs() < 1e-12);
        assert!(!report(3.0 * PI / 8.0).secure);
    }

    #[test]
    fn qber_closed_form_values() {
        assert_eq!(qber_x(0.0).unwrap(), 0.0);
        assert!((qber_x(FRAC_PI_2).unwrap() - 0.5).abs() < 1e-15);
        assert!((qber_x(FRAC_PI_4).unwrap() - 0.146_446_609_406_726_24).abs() < 1e-12);
    }

    #[test]
    fn exact_qber_matches_closed_form_in_both_bases() {
        for carrier in [CarrierFamily::G, CarrierFamily::Ghz] {
            for phi in [0.0, 0.3, FRAC_PI_4, 1.4] {
                let t = attacked_state(&AttackScenario::new(carrier, 3, phi).unwrap()).unwrap();
                for basis in [PauliAxis::X, PauliAxis::Y] {
                    let q = t.exact_qber(basis).unwrap();
                    assert!((q - qber_x(phi).unwrap()).abs() < 1e-10, "{carrier} {phi} {basis}");
                }
            }
        }
    }

    #[test]
    fn crossing_is_a_quarter_turn() {
        let phi = security_crossing(1e-12).unwrap();
        assert!((phi - FRAC_PI_4).abs() < 1e-9);
    }
}
