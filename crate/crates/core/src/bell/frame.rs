use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tensor::CorrelationTensor;
use crate::error::{QssError, Result};
use crate::qsim::{stream_rng, EXACT_TOL};

pub const DEFAULT_RESTARTS: usize = 64;

const MAX_SWEEPS: usize = 500;
const SWEEP_TOL: f64 = 1e-13;

/// Per-party measurement plane, spanned by two orthonormal directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalFrame {
    planes: Vec<[[f64; 3]; 2]>,
}

impl LocalFrame {
    pub fn new(planes: Vec<[[f64; 3]; 2]>) -> Result<Self> {
        for (k, [u, v]) in planes.iter().enumerate() {
            let (u, v) = (Vector3::from(*u), Vector3::from(*v));
            if (u.norm() - 1.0).abs() > EXACT_TOL || (v.norm() - 1.0).abs() > EXACT_TOL {
                return Err(QssError::InvalidArgument(format!("party {k}: non-unit direction")));
            }
            if u.dot(&v).abs() > EXACT_TOL {
                return Err(QssError::InvalidArgument(format!("party {k}: directions not orthogonal")));
            }
        }
        Ok(Self { planes })
    }

    /// The fixed x–y plane for every party.
    pub fn default_xy(n: usize) -> Self {
        Self {
            planes: vec![[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]; n],
        }
    }

    /// Haar-distributed planes.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let planes = (0..n)
            .map(|_| {
                let mut gauss = || Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
                let u = gauss().normalize();
                let w = gauss();
                let v = (w - u * u.dot(&w)).normalize();
                [u.into(), v.into()]
            })
            .collect();
        Self { planes }
    }

    pub fn n_parties(&self) -> usize {
        self.planes.len()
    }

    pub fn planes(&self) -> &[[[f64; 3]; 2]] {
        &self.planes
    }

    /// Full local rotation with rows `u`, `v`, `u × v`.
    pub fn rotation(&self, party: usize) -> Matrix3<f64> {
        let [u, v] = self.planes[party];
        let (u, v) = (Vector3::from(u), Vector3::from(v));
        Matrix3::from_rows(&[u.transpose(), v.transpose(), u.cross(&v).transpose()])
    }

    pub(crate) fn plane_rows(&self) -> Vec<Vec<[f64; 3]>> {
        self.planes.iter().map(|p| p.to_vec()).collect()
    }
}

/// Best plane sum found by the search, a lower bound on the maximum over all
/// frames.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameSearch {
    pub value: f64,
    pub frame: LocalFrame,
    pub restarts: usize,
    /// Restart that produced `value`; 0 is the default frame.
    pub best_restart: usize,
}

/// Alternating per-party maximization of the plane sum. Restart 0 starts from
/// the default frame; restart `r > 0` from random planes drawn on stream `r`.
pub fn maximize_plane_sum(t: &CorrelationTensor, restarts: usize, seed: u64) -> Result<FrameSearch> {
    if restarts == 0 {
        return Err(QssError::InvalidArgument("at least one restart required".into()));
    }
    let n = t.n();
    let results: Vec<(f64, LocalFrame)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = if r == 0 {
                LocalFrame::default_xy(n)
            } else {
                LocalFrame::random(n, &mut stream_rng(seed, r as u64))
            };
            climb(t, start)
        })
        .collect();
    let (best_restart, (value, frame)) = results
        .into_iter()
        .enumerate()
        .fold(None, |best: Option<(usize, (f64, LocalFrame))>, (i, cand)| match best {
            Some((_, (v, _))) if v >= cand.0 => best,
            _ => Some((i, cand)),
        })
        .expect("at least one restart");
    Ok(FrameSearch {
        value,
        frame,
        restarts,
        best_restart,
    })
}

fn climb(t: &CorrelationTensor, start: LocalFrame) -> (f64, LocalFrame) {
    let n = t.n();
    let mut rows = start.plane_rows();
    let mut value = plane_value(t, &rows);
    for _ in 0..MAX_SWEEPS {
        let before = value;
        for k in 0..n {
            let (data, _) = t.contract_all(&rows, Some(k));
            // data is laid out [outer, 3, inner]; C = M Mᵀ with M the 3 × rest unfolding
            let inner = 2usize.pow((n - 1 - k) as u32);
            let outer = data.len() / (3 * inner);
            let mut c = Matrix3::<f64>::zeros();
            for o in 0..outer {
                for a in 0..3 {
                    for b in a..3 {
                        let ra = &data[(o * 3 + a) * inner..][..inner];
                        let rb = &data[(o * 3 + b) * inner..][..inner];
                        c[(a, b)] += ra.iter().zip(rb).map(|(x, y)| x * y).sum::<f64>();
                    }
                }
            }
            for a in 0..3 {
                for b in 0..a {
                    c[(a, b)] = c[(b, a)];
                }
            }
            let eig = c.symmetric_eigen();
            let mut order = [0usize, 1, 2];
            order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
            let pick = |i: usize| {
                let col = eig.eigenvectors.column(order[i]);
                [col[0], col[1], col[2]]
            };
            rows[k] = vec![pick(0), pick(1)];
            value = eig.eigenvalues[order[0]] + eig.eigenvalues[order[1]];
        }
        if value - before <= SWEEP_TOL * before.max(1.0) {
            break;
        }
    }
    let planes = rows.iter().map(|r| [r[0], r[1]]).collect();
    let frame = LocalFrame { planes };
    (plane_value(t, &rows), frame)
}

fn plane_value(t: &CorrelationTensor, rows: &[Vec<[f64; 3]>]) -> f64 {
    let (data, _) = t.contract_all(rows, None);
    data.iter().map(|e| e * e).sum()
}
