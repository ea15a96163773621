//! Python module `qss`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use qss_core::attack::{self, AttackScenario, CollapsePattern};
use qss_core::bell;
use qss_core::export;
use qss_core::protocol::{self, ProtocolConfig, ProtocolTranscript};
use qss_core::qsim::{self, PauliString, QuantumState, C64};
use qss_core::rdm;
use qss_core::states::{self, CarrierFamily};
use qss_core::QssError;

fn py_err(e: QssError) -> PyErr {
    match e {
        QssError::InvalidState(_)
        | QssError::ZeroProbabilityBranch(_)
        | QssError::InternalInconsistency(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for qss_core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn family(name: &str) -> PyResult<CarrierFamily> {
    name.parse().py()
}

fn pauli(label: &str) -> PyResult<PauliString> {
    label.parse().py()
}

fn matrix_rows(dim: usize, at: impl Fn(usize, usize) -> C64) -> Vec<Vec<C64>> {
    (0..dim).map(|r| (0..dim).map(|c| at(r, c)).collect()).collect()
}

#[pyclass(name = "PureState", module = "qss", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPureState {
    inner: qsim::PureState,
}

#[pymethods]
impl PyPureState {
    #[new]
    fn new(n_qubits: usize, amplitudes: Vec<C64>) -> PyResult<Self> {
        Ok(Self {
            inner: qsim::PureState::new(n_qubits, amplitudes).py()?,
        })
    }

    /// Computational basis state from a bit string such as `"0110"`.
    #[staticmethod]
    fn basis(bits: &str) -> PyResult<Self> {
        Ok(Self {
            inner: qsim::PureState::basis(bits.len(), bits).py()?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: qsim::PureState::from_json(text).py()?,
        })
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    fn amplitudes(&self) -> Vec<C64> {
        self.inner.amplitudes().to_vec()
    }

    /// `⟨ψ|P|ψ⟩` for a label such as `"XIYZ"`.
    fn expectation(&self, label: &str) -> PyResult<f64> {
        self.inner.expectation(&pauli(label)?).py()
    }

    fn reduced(&self, keep: Vec<usize>) -> PyResult<PyDensityMatrix> {
        Ok(PyDensityMatrix {
            inner: self.inner.reduced(&keep).py()?,
        })
    }

    fn to_density(&self) -> PyResult<PyDensityMatrix> {
        Ok(PyDensityMatrix {
            inner: self.inner.to_density().py()?,
        })
    }

    /// Outcome probabilities of measuring `qubits` in `bases` (e.g. `"XY"`),
    /// first qubit most significant, `+1` before `−1`.
    fn outcome_distribution(&self, qubits: Vec<usize>, bases: &str) -> PyResult<Vec<f64>> {
        let axes = bases
            .chars()
            .map(|c| c.to_string().parse().py())
            .collect::<PyResult<Vec<_>>>()?;
        self.inner.outcome_distribution(&qubits, &axes).py()
    }

    fn distance_up_to_phase(&self, other: &PyPureState) -> PyResult<f64> {
        self.inner.distance_up_to_phase(&other.inner).py()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("PureState(n_qubits={})", self.inner.n_qubits())
    }
}

#[pyclass(name = "DensityMatrix", module = "qss", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDensityMatrix {
    inner: qsim::DensityMatrix,
}

#[pymethods]
impl PyDensityMatrix {
    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        let m = self.inner.matrix();
        matrix_rows(self.inner.dim(), |r, c| m[(r, c)])
    }

    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        self.inner.eigenvalues().py()
    }

    fn expectation(&self, label: &str) -> PyResult<f64> {
        self.inner.expectation(&pauli(label)?).py()
    }

    fn partial_trace(&self, keep: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.partial_trace(&keep).py()?,
        })
    }

    fn trace_distance(&self, other: &PyDensityMatrix) -> PyResult<f64> {
        self.inner.trace_distance(&other.inner).py()
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(n_qubits={})", self.inner.n_qubits())
    }
}

#[pyfunction]
fn g_state(n: usize) -> PyResult<PyPureState> {
    Ok(PyPureState {
        inner: states::g_state(n).py()?,
    })
}

#[pyfunction]
fn ghz_state(n: usize) -> PyResult<PyPureState> {
    Ok(PyPureState {
        inner: states::ghz_state(n).py()?,
    })
}

#[pyfunction]
fn w_state(n: usize) -> PyResult<PyPureState> {
    Ok(PyPureState {
        inner: states::w_state(n).py()?,
    })
}

#[pyfunction]
fn carrier_state(carrier: &str, n: usize) -> PyResult<PyPureState> {
    Ok(PyPureState {
        inner: states::carrier_state(family(carrier)?, n).py()?,
    })
}

/// `p·|ψ⟩⟨ψ| + (1 − p)·I/2^n`.
#[pyfunction]
fn add_white_noise(state: &PyPureState, p: f64) -> PyResult<PyDensityMatrix> {
    Ok(PyDensityMatrix {
        inner: states::add_white_noise(&state.inner, p).py()?.realized,
    })
}

#[pyfunction]
fn parity_sign(carrier: &str, m: usize, axis: &str) -> PyResult<i8> {
    states::parity_sign(family(carrier)?, m, axis.parse().py()?).py()
}

#[pyfunction]
fn mutual_info_ab(phi: f64) -> PyResult<f64> {
    attack::mutual_info_ab(phi).py()
}

#[pyfunction]
fn mutual_info_ae(phi: f64) -> PyResult<f64> {
    attack::mutual_info_ae(phi).py()
}

#[pyfunction]
fn qber_x(phi: f64) -> PyResult<f64> {
    attack::qber_x(phi).py()
}

#[pyfunction]
#[pyo3(signature = (tol = 1e-12))]
fn security_crossing(tol: f64) -> PyResult<f64> {
    attack::security_crossing(tol).py()
}

/// Attacked carrier for `2m` parties plus the eavesdropper's probe.
#[pyclass(name = "AttackedState", module = "qss", frozen)]
struct PyAttackedState {
    inner: attack::TripartiteState,
}

#[pymethods]
impl PyAttackedState {
    #[new]
    fn new(carrier: &str, m: usize, phi: f64) -> PyResult<Self> {
        let scenario = AttackScenario::new(family(carrier)?, m, phi).py()?;
        Ok(Self {
            inner: attack::attacked_state(&scenario).py()?,
        })
    }

    fn state(&self) -> PyPureState {
        PyPureState {
            inner: self.inner.psi().clone(),
        }
    }

    /// Alice and Bob `kept_bob` after the other Bobs collapse on all `+1`.
    fn rho_ab(&self, kept_bob: usize) -> PyResult<PyDensityMatrix> {
        Ok(PyDensityMatrix {
            inner: self.inner.coalition_collapse(kept_bob, CollapsePattern::AllPlus).py()?,
        })
    }

    fn rho_ae(&self) -> PyResult<PyDensityMatrix> {
        Ok(PyDensityMatrix {
            inner: self.inner.rho_ae().py()?,
        })
    }

    fn exact_mutual_info_ab(&self) -> PyResult<f64> {
        self.inner.exact_mutual_info_ab().py()
    }

    fn exact_qber(&self, basis: &str) -> PyResult<f64> {
        self.inner.exact_qber(basis.parse().py()?).py()
    }

    /// Exact information a proper subset of Bobs (0-based) holds about
    /// Alice's sifted bit.
    fn exact_coalition_info(&self, subset: Vec<usize>) -> PyResult<f64> {
        protocol::exact_coalition_info(&self.inner, &subset).py()
    }
}

/// Rows of `(phi, i_ab, i_ae, margin, qber, horodecki_ab, horodecki_ae)`.
#[pyfunction]
fn attack_sweep(carrier: &str, m: usize, grid: Vec<f64>) -> PyResult<Vec<(f64, f64, f64, f64, f64, f64, f64)>> {
    Ok(attack::attack_sweep(family(carrier)?, m, &grid)
        .py()?
        .into_iter()
        .map(|r| (r.phi, r.i_ab, r.i_ae, r.margin, r.qber, r.horodecki_ab, r.horodecki_ae))
        .collect())
}

#[pyclass(name = "ProtocolRun", module = "qss", frozen)]
struct PyProtocolRun {
    transcript: ProtocolTranscript,
}

#[pymethods]
impl PyProtocolRun {
    #[getter]
    fn rounds(&self) -> usize {
        self.transcript.config.rounds
    }

    #[getter]
    fn sift_count(&self) -> usize {
        self.transcript.sift_count
    }

    #[getter]
    fn alice_key(&self) -> Vec<u8> {
        self.transcript.alice_key.clone()
    }

    #[getter]
    fn bob_product_key(&self) -> Vec<u8> {
        self.transcript.bob_product_key.clone()
    }

    /// `(error_rate, error_rate_x, error_rate_y)`.
    fn error_rates(&self) -> PyResult<(f64, Option<f64>, Option<f64>)> {
        let k = protocol::reconstruct_key(&self.transcript).py()?;
        Ok((k.error_rate, k.error_rate_x(), k.error_rate_y()))
    }

    /// Plug-in estimate in bits for a proper subset of Bobs (0-based).
    fn coalition_info(&self, subset: Vec<usize>) -> PyResult<f64> {
        Ok(protocol::coalition_info(&self.transcript, &subset).py()?.bits)
    }

    fn transcript_jsonl(&self) -> PyResult<String> {
        export::transcript_jsonl(&self.transcript).py()
    }

    fn summary_json(&self) -> PyResult<String> {
        let m = self.transcript.config.m();
        let s = export::protocol_summary(&self.transcript, &export::default_coalitions(m)).py()?;
        export::summary_json(&s).py()
    }
}

#[pyfunction]
#[pyo3(signature = (carrier, m, phi, rounds, seed = 0))]
fn run_protocol(carrier: &str, m: usize, phi: f64, rounds: usize, seed: u64) -> PyResult<PyProtocolRun> {
    let config = ProtocolConfig::new(AttackScenario::new(family(carrier)?, m, phi).py()?, rounds, seed).py()?;
    let transcript = py_release(move || protocol::run_protocol(&config))?;
    Ok(PyProtocolRun { transcript })
}

fn py_release<T: Send>(f: impl FnOnce() -> qss_core::Result<T> + Send) -> PyResult<T> {
    Python::attach(|py| py.detach(f)).py()
}

#[pyfunction]
fn horodecki_m(rho: &PyDensityMatrix) -> PyResult<f64> {
    bell::horodecki_m(&rho.inner).py()
}

#[pyclass(name = "CorrelationTensor", module = "qss", frozen)]
struct PyCorrelationTensor {
    inner: bell::CorrelationTensor,
}

#[pymethods]
impl PyCorrelationTensor {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Entries in xyz row-major order.
    fn entries(&self) -> Vec<f64> {
        self.inner.entries().to_vec()
    }

    /// Entry for a label such as `"xxzzzz"`.
    fn get(&self, label: &str) -> PyResult<f64> {
        self.inner.get_label(label).py()
    }

    fn full_sum(&self) -> f64 {
        self.inner.full_sum()
    }

    /// Sum over the fixed x–y planes.
    fn plane_sum(&self) -> PyResult<f64> {
        self.inner.plane_sum(None).py()
    }

    /// `(value, planes)` of the best frame found; planes are per-party pairs
    /// of unit vectors.
    #[pyo3(signature = (restarts = bell::DEFAULT_RESTARTS, seed = 0))]
    fn maximize_plane_sum(&self, restarts: usize, seed: u64) -> PyResult<(f64, Vec<[[f64; 3]; 2]>)> {
        let s = bell::maximize_plane_sum(&self.inner, restarts, seed).py()?;
        Ok((s.value, s.frame.planes().to_vec()))
    }
}

#[pyfunction]
fn correlation_tensor(state: &Bound<'_, PyAny>) -> PyResult<PyCorrelationTensor> {
    let inner = if let Ok(psi) = state.cast::<PyPureState>() {
        bell::correlation_tensor(&psi.get().inner)
    } else if let Ok(rho) = state.cast::<PyDensityMatrix>() {
        bell::correlation_tensor(&rho.get().inner)
    } else {
        return Err(PyValueError::new_err("expected a PureState or DensityMatrix"));
    };
    Ok(PyCorrelationTensor { inner: inner.py()? })
}

#[pyfunction]
fn collapse_visibility(n: usize, p: f64) -> PyResult<f64> {
    bell::collapse_visibility(n, p).py()
}

#[pyfunction]
fn crit_noise_g(n: usize) -> PyResult<f64> {
    bell::crit_noise_g(n).py()
}

#[pyfunction]
fn crit_noise_ghz(n: usize) -> PyResult<f64> {
    bell::crit_noise_ghz(n).py()
}

/// Rows of `(n, p_crit_g, q_crit_ghz, g_more_robust)`.
#[pyfunction]
fn crossover_scan(n_min: usize, n_max: usize) -> PyResult<Vec<(usize, f64, f64, bool)>> {
    Ok(bell::crossover_scan(n_min, n_max)
        .py()?
        .into_iter()
        .map(|r| (r.n, r.p_crit_g, r.q_crit_ghz, r.g_more_robust))
        .collect())
}

#[pyfunction]
fn lr_sufficiency_thresholds() -> PyResult<(f64, f64)> {
    bell::lr_sufficiency_thresholds().py()
}

#[pyfunction]
fn ghz_counterexample_check(n: usize) -> PyResult<bool> {
    rdm::ghz_counterexample_check(n).py()
}

#[pyclass(name = "GramSolution", module = "qss", frozen)]
struct PyGramSolution {
    inner: rdm::GramSolution,
}

#[pymethods]
impl PyGramSolution {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn forced_product(&self) -> bool {
        self.inner.forced_product
    }

    #[getter]
    fn nullspace_dim(&self) -> usize {
        self.inner.nullspace_dim
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    fn gram(&self) -> Vec<Vec<C64>> {
        let m = self.inner.gram_matrix();
        matrix_rows(4, |r, c| m[(r, c)])
    }

    fn to_json(&self) -> PyResult<String> {
        export::gram_json(&self.inner).py()
    }
}

#[pyfunction]
fn g_uniqueness_check(n: usize) -> PyResult<PyGramSolution> {
    Ok(PyGramSolution {
        inner: rdm::g_uniqueness_check(n).py()?,
    })
}

#[pymodule]
fn qss(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyAttackedState>()?;
    m.add_class::<PyProtocolRun>()?;
    m.add_class::<PyCorrelationTensor>()?;
    m.add_class::<PyGramSolution>()?;
    m.add_function(wrap_pyfunction!(g_state, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_state, m)?)?;
    m.add_function(wrap_pyfunction!(w_state, m)?)?;
    m.add_function(wrap_pyfunction!(carrier_state, m)?)?;
    m.add_function(wrap_pyfunction!(add_white_noise, m)?)?;
    m.add_function(wrap_pyfunction!(parity_sign, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_info_ab, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_info_ae, m)?)?;
    m.add_function(wrap_pyfunction!(qber_x, m)?)?;
    m.add_function(wrap_pyfunction!(security_crossing, m)?)?;
    m.add_function(wrap_pyfunction!(attack_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(horodecki_m, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_tensor, m)?)?;
    m.add_function(wrap_pyfunction!(collapse_visibility, m)?)?;
    m.add_function(wrap_pyfunction!(crit_noise_g, m)?)?;
    m.add_function(wrap_pyfunction!(crit_noise_ghz, m)?)?;
    m.add_function(wrap_pyfunction!(crossover_scan, m)?)?;
    m.add_function(wrap_pyfunction!(lr_sufficiency_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_counterexample_check, m)?)?;
    m.add_function(wrap_pyfunction!(g_uniqueness_check, m)?)?;
    m.add("SCHEMA_VERSION", export::SCHEMA_VERSION)?;
    Ok(())
}
