use nalgebra::Matrix3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::frame::LocalFrame;
use crate::error::{QssError, Result};
use crate::qsim::{PauliAxis, PauliString, QuantumState, EXACT_TOL};

/// Largest register whose full tensor is materialized (3^8 = 6561 entries).
pub const MAX_TENSOR_QUBITS: usize = 8;

const ENTRY_SLACK: f64 = 1e-9;

/// `T_{a_1…a_n} = tr(ρ σ_{a_1} ⊗ … ⊗ σ_{a_n})`, stored row-major with axis
/// order x, y, z and party 0 the slowest index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTensor {
    n: usize,
    entries: Vec<f64>,
}

impl CorrelationTensor {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || n > MAX_TENSOR_QUBITS {
            return Err(QssError::BudgetExceeded(format!(
                "tensor rank {n} outside 1..={MAX_TENSOR_QUBITS}"
            )));
        }
        if entries.len() != 3usize.pow(n as u32) {
            return Err(QssError::InvalidDimension(format!(
                "{} entries for rank {n}",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| !e.is_finite() || e.abs() > 1.0 + ENTRY_SLACK) {
            return Err(QssError::InvalidState(format!("tensor entry {bad} outside [-1,1]")));
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, axes: &[PauliAxis]) -> Result<f64> {
        if axes.len() != self.n {
            return Err(QssError::InvalidDimension(format!(
                "{} axes for rank {}",
                axes.len(),
                self.n
            )));
        }
        Ok(self.entries[flat_index(axes)])
    }

    /// Entry from a label such as `"xxzzzz"`.
    pub fn get_label(&self, label: &str) -> Result<f64> {
        let axes = parse_label(label)?;
        self.get(&axes)
    }

    /// `Σ T²` over all 3^n entries; unchanged by local rotations.
    pub fn full_sum(&self) -> f64 {
        self.entries.iter().map(|e| e * e).sum()
    }

    /// `Σ T²` with every index restricted to the party's measurement plane.
    /// `None` is the fixed x–y plane of the protocol.
    pub fn plane_sum(&self, frame: Option<&LocalFrame>) -> Result<f64> {
        let rows: Vec<Vec<[f64; 3]>> = match frame {
            None => vec![vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]; self.n],
            Some(f) => {
                self.check_frame(f)?;
                f.plane_rows()
            }
        };
        let (data, _) = self.contract_all(&rows, None);
        Ok(data.iter().map(|e| e * e).sum())
    }

    /// Tensor in rotated local bases: `T'_{a…} = Σ R⁽¹⁾_{a b} … T_{b…}`.
    pub fn rotate(&self, rotations: &[Matrix3<f64>]) -> Result<Self> {
        if rotations.len() != self.n {
            return Err(QssError::InvalidDimension(format!(
                "{} rotations for rank {}",
                rotations.len(),
                self.n
            )));
        }
        let rows: Vec<Vec<[f64; 3]>> = rotations
            .iter()
            .map(|r| (0..3).map(|a| [r[(a, 0)], r[(a, 1)], r[(a, 2)]]).collect())
            .collect();
        let (entries, _) = self.contract_all(&rows, None);
        Ok(Self { n: self.n, entries })
    }

    /// Linear combination `a·self + b·other`, without range validation.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(QssError::InvalidDimension(format!(
                "ranks {} and {}",
                self.n, other.n
            )));
        }
        Ok(Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    fn check_frame(&self, frame: &LocalFrame) -> Result<()> {
        if frame.n_parties() != self.n {
            return Err(QssError::InvalidDimension(format!(
                "frame for {} parties, tensor rank {}",
                frame.n_parties(),
                self.n
            )));
        }
        Ok(())
    }

    /// Contracts every mode except `skip` with the given row sets. Returns the
    /// data and its shape.
    pub(crate) fn contract_all(
        &self,
        rows: &[Vec<[f64; 3]>],
        skip: Option<usize>,
    ) -> (Vec<f64>, Vec<usize>) {
        let mut data = self.entries.clone();
        let mut dims = vec![3usize; self.n];
        for (mode, r) in rows.iter().enumerate() {
            if Some(mode) == skip {
                continue;
            }
            data = contract_mode(&data, &dims, mode, r);
            dims[mode] = r.len();
        }
        (data, dims)
    }
}

fn contract_mode(data: &[f64], dims: &[usize], mode: usize, rows: &[[f64; 3]]) -> Vec<f64> {
    let outer: usize = dims[..mode].iter().product();
    let inner: usize = dims[mode + 1..].iter().product();
    let width = dims[mode];
    let mut out = vec![0.0; outer * rows.len() * inner];
    for o in 0..outer {
        for (a, row) in rows.iter().enumerate() {
            let dst = &mut out[(o * rows.len() + a) * inner..][..inner];
            for (c, &w) in row.iter().enumerate().take(width) {
                if w == 0.0 {
                    continue;
                }
                let src = &data[(o * width + c) * inner..][..inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }
    out
}

fn flat_index(axes: &[PauliAxis]) -> usize {
    axes.iter().fold(0, |acc, a| acc * 3 + a.index())
}

fn parse_label(label: &str) -> Result<Vec<PauliAxis>> {
    label
        .chars()
        .map(|c| match c.to_ascii_lowercase() {
            'x' => Ok(PauliAxis::X),
            'y' => Ok(PauliAxis::Y),
            'z' => Ok(PauliAxis::Z),
            _ => Err(QssError::InvalidArgument(format!("bad axis '{c}' in {label:?}"))),
        })
        .collect()
}

fn axes_of(index: usize, n: usize) -> Vec<PauliAxis> {
    let mut axes = vec![PauliAxis::X; n];
    let mut rest = index;
    for slot in axes.iter_mut().rev() {
        *slot = PauliAxis::from_index(rest % 3).expect("index below 3");
        rest /= 3;
    }
    axes
}

/// Full correlation tensor of a pure or mixed state on at most eight qubits.
pub fn correlation_tensor<S: QuantumState + Sync + ?Sized>(state: &S) -> Result<CorrelationTensor> {
    let n = state.n_qubits();
    if n > MAX_TENSOR_QUBITS {
        return Err(QssError::BudgetExceeded(format!(
            "{n}-qubit tensor exceeds the {MAX_TENSOR_QUBITS}-qubit budget"
        )));
    }
    state.check_valid()?;
    let entries: Vec<f64> = (0..3usize.pow(n as u32))
        .into_par_iter()
        .map(|i| {
            let value = state.raw_expectation(&PauliString::from_axes(&axes_of(i, n)));
            if value.im.abs() > EXACT_TOL {
                Err(QssError::InvalidState(format!(
                    "correlation {} has imaginary part {:.3e}",
                    PauliString::from_axes(&axes_of(i, n)),
                    value.im
                )))
            } else {
                Ok(value.re)
            }
        })
        .collect::<Result<_>>()?;
    CorrelationTensor::new(n, entries)
}
