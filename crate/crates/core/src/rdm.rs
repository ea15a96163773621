//! Reduced-density-matrix analysis.
//!
//! The uniqueness check never represents environment vectors. A state whose
//! `(n−1)`-party marginals match those of G_n has a purification
//! `(|v_0⟩|E_0⟩ + |v_1⟩|E_1⟩)/√2` with `|E_i⟩ = |0⟩|e_{i0}⟩ + |1⟩|e_{i1}⟩`, and
//! every marginal constraint is linear in the 4×4 Gram matrix
//! `G[ℓ', ℓ] = ⟨e_ℓ'|e_ℓ⟩`, `ℓ = 2i + j`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result};
use crate::qsim::{hermitian_eigenvalues, DensityMatrix, PureState, QuantumState, Split, C64};
use crate::states::{g_state, v_states};

const MARGINAL_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-9;
const FEASIBLE_TOL: f64 = 1e-8;
const PRODUCT_TOL: f64 = 1e-9;
const N_PARAMS: usize = 16;

fn require_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(QssError::InvalidArgument(format!("need n >= 3, got {n}")));
    }
    Ok(())
}

/// The `n` single-party-deleted marginals; entry `k` omits party `k`.
#[derive(Clone, Debug)]
pub struct MarginalSet {
    n: usize,
    marginals: Vec<DensityMatrix>,
}

impl MarginalSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn marginals(&self) -> &[DensityMatrix] {
        &self.marginals
    }

    /// Marginal with party `left_out` traced away.
    pub fn get(&self, left_out: usize) -> Option<&DensityMatrix> {
        self.marginals.get(left_out)
    }

    /// Largest entrywise difference over all `n` marginals.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(QssError::InvalidDimension(format!(
                "marginal sets of {} and {} parties",
                self.n, other.n
            )));
        }
        self.marginals
            .iter()
            .zip(&other.marginals)
            .try_fold(0.0f64, |acc, (a, b)| Ok(acc.max(a.max_abs_diff(b)?)))
    }
}

pub fn marginal_set<S: QuantumState + ?Sized>(state: &S) -> Result<MarginalSet> {
    let n = state.n_qubits();
    require_n(n)?;
    let marginals = (0..n)
        .map(|k| {
            let keep: Vec<usize> = (0..n).filter(|&q| q != k).collect();
            let rho = state.reduced(&keep)?;
            rho.validate()?;
            Ok(rho)
        })
        .collect::<Result<_>>()?;
    Ok(MarginalSet { n, marginals })
}

/// Compares `(|a⟩ + |b⟩)/√2` with the dephased mixture `(|a⟩⟨a| + |b⟩⟨b|)/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DephasingComparison {
    pub n: usize,
    pub max_marginal_diff: f64,
    pub trace_distance: f64,
    /// Marginals agree within 1e-10 while the full states are far apart.
    pub marginals_match: bool,
    pub states_differ: bool,
}

impl DephasingComparison {
    pub fn is_counterexample(&self) -> bool {
        self.marginals_match && self.states_differ
    }
}

pub fn dephasing_comparison(a: &PureState, b: &PureState) -> Result<DephasingComparison> {
    let n = a.n_qubits();
    require_n(n)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let sum: Vec<C64> = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x + y) * h)
        .collect();
    let coherent = PureState::from_unnormalized(n, sum)?.to_density()?;
    let mixture = a.to_density()?.mix(0.5, &b.to_density()?)?;
    let max_marginal_diff = marginal_set(&coherent)?.max_abs_diff(&marginal_set(&mixture)?)?;
    let trace_distance = coherent.trace_distance(&mixture)?;
    Ok(DephasingComparison {
        n,
        max_marginal_diff,
        trace_distance,
        marginals_match: max_marginal_diff <= MARGINAL_TOL,
        states_differ: trace_distance > 0.4,
    })
}

/// GHZ_n and the classical mixture of `|0…0⟩`, `|1…1⟩` share every
/// `(n−1)`-party marginal but differ as states.
pub fn ghz_counterexample_check(n: usize) -> Result<bool> {
    require_n(n)?;
    let zeros = PureState::basis(n, &"0".repeat(n))?;
    let ones = PureState::basis(n, &"1".repeat(n))?;
    Ok(dephasing_comparison(&zeros, &ones)?.is_counterexample())
}

/// Which single-party-deleted marginals enter the constraint system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalChoice {
    /// Parties `{1…n−1}` and `{2…n}`.
    FirstLast,
    /// All `n` of them.
    All,
}

/// A positive semidefinite Gram in the solution set other than the product one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdAlternative {
    pub gram: [[[f64; 2]; 4]; 4],
    pub min_eigenvalue: f64,
    pub residual: f64,
    pub distance_from_product: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramSolution {
    pub n: usize,
    /// Minimum-norm solution, rows and columns over `e00, e01, e10, e11`, as
    /// `[re, im]` pairs.
    pub gram: [[[f64; 2]; 4]; 4],
    /// Largest constraint violation of `gram`.
    pub residual: f64,
    /// Largest constraint violation of the product Gram.
    pub product_residual: f64,
    pub nullspace_dim: usize,
    pub forced_product: bool,
    pub marginals: MarginalChoice,
    pub psd_alternative: Option<PsdAlternative>,
}

impl GramSolution {
    pub fn gram_matrix(&self) -> DMatrix<C64> {
        from_pairs(&self.gram)
    }
}

fn to_pairs(m: &DMatrix<C64>) -> [[[f64; 2]; 4]; 4] {
    let mut out = [[[0.0; 2]; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = [m[(r, c)].re, m[(r, c)].im];
        }
    }
    out
}

fn from_pairs(p: &[[[f64; 2]; 4]; 4]) -> DMatrix<C64> {
    DMatrix::from_fn(4, 4, |r, c| C64::new(p[r][c][0], p[r][c][1]))
}

/// Off-diagonal label pairs `(p, q)`, `p < q`, in parameter order.
fn off_diagonal() -> impl Iterator<Item = (usize, usize)> {
    (0..4).flat_map(|p| (p + 1..4).map(move |q| (p, q)))
}

/// 16 real parameters: four diagonal entries, then `(Re, Im)` of `G[p, q]`.
fn gram_from_params(x: &[f64]) -> DMatrix<C64> {
    let mut g = DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
    for l in 0..4 {
        g[(l, l)] = C64::new(x[l], 0.0);
    }
    for (k, (p, q)) in off_diagonal().enumerate() {
        let z = C64::new(x[4 + 2 * k], x[5 + 2 * k]);
        g[(p, q)] = z;
        g[(q, p)] = z.conj();
    }
    g
}

fn params_from_gram(g: &DMatrix<C64>) -> Vec<f64> {
    let mut x: Vec<f64> = (0..4).map(|l| g[(l, l)].re).collect();
    for (p, q) in off_diagonal() {
        x.push(g[(p, q)].re);
        x.push(g[(p, q)].im);
    }
    x
}

/// `e00 = e11` a common unit vector, `e01 = e10 = 0`: the purification is
/// `|G_n⟩` times an environment state.
pub fn product_gram() -> DMatrix<C64> {
    let mut g = DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
    for (a, b) in [(0, 0), (3, 3), (0, 3), (3, 0)] {
        g[(a, b)] = C64::new(1.0, 0.0);
    }
    g
}

/// Real-ified constraint system `L x = b`.
struct GramSystem {
    l: DMatrix<f64>,
    b: DVector<f64>,
}

fn assemble(n: usize, choice: MarginalChoice) -> Result<GramSystem> {
    let (v0, v1) = v_states(n)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    // coefficient of e_ℓ in the amplitude of basis state x
    let coeff: Vec<[f64; 4]> = (0..1usize << n)
        .map(|x| {
            let (rest, last) = (x >> 1, x & 1);
            let mut c = [0.0; 4];
            c[last] = v0.amplitudes()[rest].re * h;
            c[2 + last] = v1.amplitudes()[rest].re * h;
            c
        })
        .collect();
    let target = g_state(n)?;
    let left_out: Vec<usize> = match choice {
        MarginalChoice::FirstLast => vec![n - 1, 0],
        MarginalChoice::All => (0..n).collect(),
    };
    let mut rows: Vec<[f64; N_PARAMS]> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for k in left_out {
        let keep: Vec<usize> = (0..n).filter(|&q| q != k).collect();
        let rho = target.reduced(&keep)?;
        let split = Split::new(&keep, n);
        for (a, &ka) in split.kept.iter().enumerate() {
            for (b, &kb) in split.kept.iter().enumerate() {
                // K[ℓ'][ℓ] multiplies G[ℓ', ℓ]
                let mut kk = [[0.0; 4]; 4];
                for &t in &split.traced {
                    let (ca, cb) = (&coeff[ka | t], &coeff[kb | t]);
                    for (lp, row) in kk.iter_mut().enumerate() {
                        for (l, cell) in row.iter_mut().enumerate() {
                            *cell += cb[lp] * ca[l];
                        }
                    }
                }
                let mut re = [0.0; N_PARAMS];
                let mut im = [0.0; N_PARAMS];
                for l in 0..4 {
                    re[l] = kk[l][l];
                }
                for (i, (p, q)) in off_diagonal().enumerate() {
                    re[4 + 2 * i] = kk[p][q] + kk[q][p];
                    im[5 + 2 * i] = kk[p][q] - kk[q][p];
                }
                let value = rho.matrix()[(a, b)];
                for (coeffs, target) in [(re, value.re), (im, value.im)] {
                    if coeffs.iter().any(|c| c.abs() > 0.0) || target.abs() > 0.0 {
                        rows.push(coeffs);
                        rhs.push(target);
                    }
                }
            }
        }
    }
    let l = DMatrix::from_fn(rows.len(), N_PARAMS, |r, c| rows[r][c]);
    Ok(GramSystem {
        l,
        b: DVector::from_vec(rhs),
    })
}

fn max_violation(sys: &GramSystem, x: &[f64]) -> f64 {
    let r = &sys.l * DVector::from_column_slice(x) - &sys.b;
    r.amax()
}

/// Solves the marginal constraints for the Gram matrix and reports whether
/// the product purification is the only solution.
pub fn g_uniqueness_check(n: usize) -> Result<GramSolution> {
    g_uniqueness_check_with(n, MarginalChoice::FirstLast)
}

pub fn g_uniqueness_check_with(n: usize, marginals: MarginalChoice) -> Result<GramSolution> {
    require_n(n)?;
    let sys = assemble(n, marginals)?;
    let svd = sys.l.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let cutoff = RANK_TOL * s_max.max(1.0);
    let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
    let nullspace_dim = N_PARAMS - rank;
    let x = svd
        .solve(&sys.b, cutoff)
        .map_err(|e| QssError::InternalInconsistency(format!("least squares failed: {e}")))?;
    let x: Vec<f64> = x.iter().copied().collect();
    let residual = max_violation(&sys, &x);
    let product = product_gram();
    let product_residual = max_violation(&sys, &params_from_gram(&product));
    if residual > FEASIBLE_TOL || product_residual > FEASIBLE_TOL {
        return Err(QssError::InternalInconsistency(format!(
            "constraint system infeasible (residual {residual:.3e}, product {product_residual:.3e})"
        )));
    }
    let gram = gram_from_params(&x);
    let distance = max_entry_diff(&gram, &product);
    let forced_product = nullspace_dim == 0 && distance < PRODUCT_TOL && residual < PRODUCT_TOL;
    let psd_alternative = if nullspace_dim > 0 {
        let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
        let null: Vec<DVector<f64>> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s <= cutoff)
            .map(|(i, _)| v_t.row(i).transpose())
            .collect();
        psd_search(&sys, &x, &null)?
    } else {
        None
    };
    Ok(GramSolution {
        n,
        gram: to_pairs(&gram),
        residual,
        product_residual,
        nullspace_dim,
        forced_product,
        marginals,
        psd_alternative,
    })
}

fn max_entry_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Alternating projections between the affine solution set and the PSD cone,
/// starting at the minimum-norm solution.
fn psd_search(sys: &GramSystem, x0: &[f64], null: &[DVector<f64>]) -> Result<Option<PsdAlternative>> {
    let base = DVector::from_column_slice(x0);
    let mut x = base.clone();
    for _ in 0..2000 {
        let g = gram_from_params(x.as_slice());
        let eig = g.clone().symmetric_eigen();
        if eig.eigenvalues.min() >= -1e-12 {
            break;
        }
        let clipped = eig.eigenvalues.map(|v| C64::new(v.max(0.0), 0.0));
        let psd = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.adjoint();
        let y = DVector::from_vec(params_from_gram(&psd)) - &base;
        x = &base + null.iter().fold(DVector::zeros(N_PARAMS), |acc, z| acc + z * z.dot(&y));
    }
    let gram = gram_from_params(x.as_slice());
    let min_eigenvalue = hermitian_eigenvalues(&gram)?.last().copied().unwrap_or(0.0);
    let residual = max_violation(sys, x.as_slice());
    let distance_from_product = max_entry_diff(&gram, &product_gram());
    if min_eigenvalue >= -PRODUCT_TOL && residual <= FEASIBLE_TOL && distance_from_product > 1e-6 {
        Ok(Some(PsdAlternative {
            gram: to_pairs(&gram),
            min_eigenvalue,
            residual,
            distance_from_product,
        }))
    } else {
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz_state, w_state, wbar_state};

    #[test]
    fn ghz_marginals_are_classical() {
        for n in 3..=6 {
            let set = marginal_set(&ghz_state(n).unwrap()).unwrap();
            let z = PureState::basis(n - 1, &"0".repeat(n - 1)).unwrap().to_density().unwrap();
            let o = PureState::basis(n - 1, &"1".repeat(n - 1)).unwrap().to_density().unwrap();
            let expected = z.mix(0.5, &o).unwrap();
            for rho in set.marginals() {
                assert!(rho.max_abs_diff(&expected).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn g_marginal_is_v_mixture() {
        for n in 3..=7 {
            let set = marginal_set(&g_state(n).unwrap()).unwrap();
            let (v0, v1) = v_states(n).unwrap();
            let expected = v0.to_density().unwrap().mix(0.5, &v1.to_density().unwrap()).unwrap();
            assert!(set.get(n - 1).unwrap().max_abs_diff(&expected).unwrap() < 1e-12);
            // permutation symmetry: every marginal is the same matrix
            for rho in set.marginals() {
                assert!(rho.max_abs_diff(&expected).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn product_marginals() {
        let set = marginal_set(&PureState::basis(4, "0000").unwrap()).unwrap();
        let expected = PureState::basis(3, "000").unwrap().to_density().unwrap();
        assert_eq!(set.n(), 4);
        for rho in set.marginals() {
            assert!(rho.max_abs_diff(&expected).unwrap() < 1e-15);
        }
        assert!(marginal_set(&PureState::basis(2, "00").unwrap()).is_err());
    }

    #[test]
    fn ghz_counterexample_holds() {
        for n in 3..=8 {
            assert!(ghz_counterexample_check(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn g6_dephasing_is_not_a_counterexample() {
        let cmp = dephasing_comparison(&w_state(6).unwrap(), &wbar_state(6).unwrap()).unwrap();
        assert!(!cmp.marginals_match);
        assert!(!cmp.is_counterexample());
    }

    #[test]
    fn product_gram_round_trips_params() {
        let g = product_gram();
        assert_eq!(gram_from_params(&params_from_gram(&g)), g);
    }

    #[test]
    fn product_gram_satisfies_every_system() {
        for n in 3..=8 {
            for choice in [MarginalChoice::FirstLast, MarginalChoice::All] {
                let sys = assemble(n, choice).unwrap();
                assert!(max_violation(&sys, &params_from_gram(&product_gram())) < 1e-10);
            }
        }
    }

    #[test]
    fn uniqueness_by_size() {
        for n in 5..=8 {
            let s = g_uniqueness_check(n).unwrap();
            assert!(s.forced_product, "n = {n}");
            assert_eq!(s.nullspace_dim, 0);
            assert!(s.residual < 1e-9);
            assert!(s.psd_alternative.is_none());
        }
        let four = g_uniqueness_check(4).unwrap();
        assert!(!four.forced_product);
        assert!(four.nullspace_dim >= 1);
        let alt = four.psd_alternative.expect("a second PSD Gram at n = 4");
        assert!(alt.distance_from_product > 0.1);
        assert!(alt.min_eigenvalue > -1e-9);
    }

    #[test]
    fn three_parties_are_determined_too() {
        let s = g_uniqueness_check(3).unwrap();
        assert_eq!(s.nullspace_dim, 0);
        assert!(s.forced_product);
    }

    #[test]
    fn all_marginals_do_not_change_the_rank() {
        for n in 3..=7 {
            let pair = g_uniqueness_check_with(n, MarginalChoice::FirstLast).unwrap();
            let all = g_uniqueness_check_with(n, MarginalChoice::All).unwrap();
            assert_eq!(pair.nullspace_dim, all.nullspace_dim, "n = {n}");
        }
    }
}
