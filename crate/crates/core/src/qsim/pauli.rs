use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{qubit_mask, C64};
use crate::error::{QssError, Result};

/// One of the three Pauli observables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// Position in the `x, y, z` ordering.
    pub fn index(self) -> usize {
        match self {
            PauliAxis::X => 0,
            PauliAxis::Y => 1,
            PauliAxis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn symbol(self) -> char {
        match self {
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    /// `σ|b⟩ = phase · |b ⊕ flip⟩` for a single qubit in state `b`.
    #[inline]
    fn act(self, bit: usize) -> (bool, C64) {
        match self {
            PauliAxis::X => (true, C64::new(1.0, 0.0)),
            PauliAxis::Y => {
                if bit == 0 {
                    (true, C64::new(0.0, 1.0))
                } else {
                    (true, C64::new(0.0, -1.0))
                }
            }
            PauliAxis::Z => {
                if bit == 0 {
                    (false, C64::new(1.0, 0.0))
                } else {
                    (false, C64::new(-1.0, 0.0))
                }
            }
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl FromStr for PauliAxis {
    type Err = QssError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "X" | "x" => Ok(PauliAxis::X),
            "Y" | "y" => Ok(PauliAxis::Y),
            "Z" | "z" => Ok(PauliAxis::Z),
            other => Err(QssError::InvalidArgument(format!("unknown Pauli axis '{other}'"))),
        }
    }
}

/// Tensor product of single-qubit Paulis; `None` marks an identity factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<Option<PauliAxis>>,
}

impl PauliString {
    pub fn new(ops: Vec<Option<PauliAxis>>) -> Self {
        Self { ops }
    }

    /// Full-support string from one axis per qubit.
    pub fn from_axes(axes: &[PauliAxis]) -> Self {
        Self {
            ops: axes.iter().copied().map(Some).collect(),
        }
    }

    /// `σ_axis^{⊗n}`.
    pub fn uniform(axis: PauliAxis, n: usize) -> Self {
        Self {
            ops: vec![Some(axis); n],
        }
    }

    /// `axis` on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, axis: PauliAxis) -> Self {
        let mut ops = vec![None; n];
        ops[qubit] = Some(axis);
        Self { ops }
    }

    pub fn n_qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Option<PauliAxis>] {
        &self.ops
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        self.ops
            .iter()
            .enumerate()
            .filter_map(|(q, op)| op.map(|_| q))
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(Option::is_none)
    }

    /// Bit mask of qubits flipped by this string.
    pub(crate) fn flip_mask(&self) -> usize {
        let n = self.ops.len();
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, op)| matches!(op, Some(PauliAxis::X) | Some(PauliAxis::Y)))
            .fold(0, |m, (q, _)| m | qubit_mask(q, n))
    }

    /// `P|i⟩ = phase · |i ⊕ flip_mask⟩`; returns the phase.
    pub(crate) fn phase(&self, index: usize) -> C64 {
        let n = self.ops.len();
        let mut phase = C64::new(1.0, 0.0);
        for (q, op) in self.ops.iter().enumerate() {
            if let Some(axis) = op {
                let (_, p) = axis.act(super::bit_of(index, q, n));
                phase *= p;
            }
        }
        phase
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            match op {
                Some(a) => write!(f, "{a}")?,
                None => write!(f, "I")?,
            }
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QssError;

    /// Parses strings such as `"XXIZ"`.
    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .trim()
            .chars()
            .map(|c| match c {
                'I' | 'i' => Ok(None),
                other => other.to_string().parse::<PauliAxis>().map(Some),
            })
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(QssError::InvalidArgument("empty Pauli string".into()));
        }
        Ok(Self { ops })
    }
}
