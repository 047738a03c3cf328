//! Python bindings for the multi-copy imaginary-time evolution library.
//!
//! Exposes the Hamiltonian/initial-state builders, schedule compilation,
//! the execution engines, and the analysis entry points. Matrices cross
//! the boundary as nested lists of Python complex numbers.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use mcqite::analysis::{optimize_eps, tree_bound};
use mcqite::compiler::{self, ValidationOutcome};
use mcqite::engines::{self, RunOptions};
use mcqite::gates;
use mcqite::models::{self, InitialStateSpec};
use mcqite::numerics::NumericsConfig;
use mcqite::qcore::{ComplexMatrix, DensityOp, StateVector};

fn py_err(e: mcqite::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cfg() -> NumericsConfig {
    NumericsConfig::default()
}

fn matrix_to_py(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fn matrix_from_py(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    let r = rows.len();
    let c = rows.first().map(|row| row.len()).unwrap_or(0);
    if rows.iter().any(|row| row.len() != c) {
        return Err(PyValueError::new_err("ragged matrix rows"));
    }
    ComplexMatrix::new(r, c, rows.into_iter().flatten().collect()).map_err(py_err)
}

/// Hermitian Hamiltonian with a cached eigendecomposition.
#[pyclass(name = "Hamiltonian")]
#[derive(Clone)]
struct PyHamiltonian {
    inner: models::HamiltonianSpec,
}

#[pymethods]
impl PyHamiltonian {
    /// H = σz on one qubit.
    #[staticmethod]
    fn single_qubit_z() -> Self {
        PyHamiltonian {
            inner: models::HamiltonianSpec::single_qubit_z(),
        }
    }

    /// Mixed-field Ising chain on `sites` spins.
    #[staticmethod]
    #[pyo3(signature = (sites, periodic = true))]
    fn ising(sites: u32, periodic: bool) -> PyResult<Self> {
        Ok(PyHamiltonian {
            inner: models::HamiltonianSpec::mixed_field_ising(sites, periodic, &cfg())
                .map_err(py_err)?,
        })
    }

    /// Wraps an explicit Hermitian matrix (nested list of complex).
    #[staticmethod]
    fn explicit(matrix: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(PyHamiltonian {
            inner: models::HamiltonianSpec::explicit(matrix_from_py(matrix)?, &cfg())
                .map_err(py_err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues().to_vec()
    }

    fn ground_energy(&self) -> f64 {
        self.inner.ground_energy()
    }

    fn ground_state(&self) -> Vec<Complex64> {
        self.inner.ground_state().amplitudes().to_vec()
    }

    fn operator_norm(&self) -> f64 {
        self.inner.operator_norm()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        matrix_to_py(self.inner.matrix())
    }

    /// Ground energy, gap, degeneracy, and dimension.
    #[pyo3(signature = (degeneracy_tol = None))]
    fn spectral_summary<'py>(
        &self,
        py: Python<'py>,
        degeneracy_tol: Option<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let tol =
            degeneracy_tol.unwrap_or_else(|| models::default_degeneracy_tol(&self.inner, &cfg()));
        let s = models::spectral_summary(&self.inner, tol);
        let d = PyDict::new(py);
        d.set_item("ground_energy", s.ground_energy)?;
        d.set_item("gap", s.gap)?;
        d.set_item("degeneracy", s.degeneracy)?;
        d.set_item("dim", s.dim)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Hamiltonian(kind={:?}, dim={})", self.inner.kind(), self.inner.dim())
    }
}

/// Declarative initial-state description.
#[pyclass(name = "InitialState")]
#[derive(Clone)]
struct PyInitialState {
    inner: InitialStateSpec,
}

#[pymethods]
impl PyInitialState {
    /// Uniform superposition over the computational basis.
    #[staticmethod]
    fn plus_all() -> Self {
        PyInitialState {
            inner: InitialStateSpec::PlusAll,
        }
    }

    #[staticmethod]
    fn basis_zero() -> Self {
        PyInitialState {
            inner: InitialStateSpec::BasisZero,
        }
    }

    /// √p |gs> + √(1-p) |equal-weight excited superposition>.
    #[staticmethod]
    fn overlap_mix(p: f64) -> Self {
        PyInitialState {
            inner: InitialStateSpec::OverlapMix { p },
        }
    }

    #[staticmethod]
    fn explicit(amplitudes: Vec<Complex64>) -> PyResult<Self> {
        Ok(PyInitialState {
            inner: InitialStateSpec::Explicit(StateVector::new(amplitudes).map_err(py_err)?),
        })
    }

    /// Concrete amplitudes for the given Hamiltonian.
    fn build(&self, h: &PyHamiltonian) -> PyResult<Vec<Complex64>> {
        Ok(models::initial_state(&self.inner, &h.inner, &cfg())
            .map_err(py_err)?
            .amplitudes()
            .to_vec())
    }

    fn __repr__(&self) -> String {
        format!("InitialState({:?})", self.inner)
    }
}

/// Compiled gate schedule on a multi-copy register.
#[pyclass(name = "Schedule")]
#[derive(Clone)]
struct PySchedule {
    inner: compiler::Schedule,
}

#[pymethods]
impl PySchedule {
    /// Tree circuit on 2^n copies.
    #[staticmethod]
    fn tree(n: u32) -> PyResult<Self> {
        Ok(PySchedule {
            inner: compiler::build_tree(n, &cfg()).map_err(py_err)?,
        })
    }

    /// Hedge circuit on 2n copies.
    #[staticmethod]
    fn hedge(n: u32) -> PyResult<Self> {
        Ok(PySchedule {
            inner: compiler::build_hedge(n, &cfg()).map_err(py_err)?,
        })
    }

    /// Single layer of n disjoint gates on 2n copies.
    #[staticmethod]
    fn single_layer(n: u32) -> PyResult<Self> {
        Ok(PySchedule {
            inner: compiler::build_single_layer(n).map_err(py_err)?,
        })
    }

    /// Parses the line-oriented text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PySchedule {
            inner: compiler::Schedule::parse(text).map_err(py_err)?,
        })
    }

    fn serialize(&self) -> String {
        self.inner.serialize()
    }

    /// Rewrites U gates as V gates with real-time padding.
    fn to_v(&self) -> PyResult<Self> {
        Ok(PySchedule {
            inner: compiler::to_v_schedule(&self.inner).map_err(py_err)?,
        })
    }

    /// Flips the protocol direction (+1 cools the first copy).
    fn with_sign(&self, sign: i8) -> PyResult<Self> {
        if sign != 1 && sign != -1 {
            return Err(PyValueError::new_err("sign must be +1 or -1"));
        }
        let mut s = self.inner.clone();
        s.sign = sign;
        Ok(PySchedule { inner: s })
    }

    #[getter]
    fn gate_count(&self) -> usize {
        self.inner.gate_count()
    }

    #[getter]
    fn m_copies(&self) -> usize {
        self.inner.m_copies
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n
    }

    /// Replays the bookkeeping rules; returns the certificate or raises.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        match compiler::validate(&self.inner) {
            ValidationOutcome::Valid(cert) => {
                let d = PyDict::new(py);
                d.set_item("gate_count", cert.gate_count)?;
                d.set_item("final_potential", cert.final_potential)?;
                d.set_item("optimal_gate_count", cert.optimal_gate_count)?;
                d.set_item("first_copy_steps", cert.first_copy_steps)?;
                d.set_item(
                    "final_labels",
                    cert.final_labels
                        .iter()
                        .map(|l| (l.re, l.im))
                        .collect::<Vec<_>>(),
                )?;
                Ok(d)
            }
            ValidationOutcome::Invalid(v) => Err(PyValueError::new_err(format!(
                "invalid schedule at step {}: {}",
                v.step_index, v.reason
            ))),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Schedule(family={}, n={}, copies={}, gates={})",
            self.inner.family,
            self.inner.n,
            self.inner.m_copies,
            self.inner.gate_count()
        )
    }
}

/// Result of one protocol execution.
#[pyclass(name = "RunResult")]
struct PyRunResult {
    #[pyo3(get)]
    energy: f64,
    #[pyo3(get)]
    fidelity_beta: f64,
    #[pyo3(get)]
    fidelity_ground: f64,
    #[pyo3(get)]
    success_probability: f64,
    #[pyo3(get)]
    aborted: bool,
    first_copy: DensityOp,
    layers: Vec<(usize, f64, f64)>,
}

#[pymethods]
impl PyRunResult {
    /// Reduced first-copy density matrix as a nested list.
    fn first_copy(&self) -> Vec<Vec<Complex64>> {
        matrix_to_py(self.first_copy.matrix())
    }

    fn purity(&self) -> f64 {
        self.first_copy.purity_value()
    }

    /// Per-layer (layer, energy, purity) records when requested.
    fn layer_records(&self) -> Vec<(usize, f64, f64)> {
        self.layers.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult(energy={:.6}, fidelity_ground={:.6}, success={:.4})",
            self.energy, self.fidelity_ground, self.success_probability
        )
    }
}

fn wrap_result(r: engines::RunResult) -> PyRunResult {
    PyRunResult {
        energy: r.energy,
        fidelity_beta: r.fidelity_beta,
        fidelity_ground: r.fidelity_ground,
        success_probability: r.success_probability,
        aborted: r.aborted,
        first_copy: r.first_copy,
        layers: r
            .layer_records
            .iter()
            .map(|l| (l.layer, l.energy, l.purity))
            .collect(),
    }
}

/// Runs a schedule on the full multi-copy statevector.
#[pyfunction]
#[pyo3(signature = (schedule, h, init, eps, record_layers = false))]
fn run_statevector(
    schedule: &PySchedule,
    h: &PyHamiltonian,
    init: &PyInitialState,
    eps: f64,
    record_layers: bool,
) -> PyResult<PyRunResult> {
    let opts = RunOptions { record_layers };
    engines::run_statevector(&schedule.inner, &h.inner, &init.inner, eps, opts, &cfg())
        .map(wrap_result)
        .map_err(py_err)
}

/// Statevector run with mid-circuit post-selection onto the initial state.
#[pyfunction]
#[pyo3(signature = (schedule, h, init, eps, record_layers = false))]
fn run_postselected(
    schedule: &PySchedule,
    h: &PyHamiltonian,
    init: &PyInitialState,
    eps: f64,
    record_layers: bool,
) -> PyResult<PyRunResult> {
    let opts = RunOptions { record_layers };
    engines::run_postselected(&schedule.inner, &h.inner, &init.inner, eps, opts, &cfg())
        .map(wrap_result)
        .map_err(py_err)
}

/// Iterates the two-copy tree recurrence n times.
#[pyfunction]
#[pyo3(signature = (h, init, eps, n, record_layers = false))]
fn run_tree_recurrence(
    h: &PyHamiltonian,
    init: &PyInitialState,
    eps: f64,
    n: u32,
    record_layers: bool,
) -> PyResult<PyRunResult> {
    let opts = RunOptions { record_layers };
    engines::run_tree_recurrence(&h.inner, &init.inner, eps, n, opts, &cfg())
        .map(wrap_result)
        .map_err(py_err)
}

/// Normalized e^{-beta H} |phi>.
#[pyfunction]
fn imaginary_evolved(
    h: &PyHamiltonian,
    amplitudes: Vec<Complex64>,
    beta: f64,
) -> PyResult<Vec<Complex64>> {
    let phi = StateVector::new(amplitudes).map_err(py_err)?;
    Ok(models::imaginary_evolved(&h.inner, &phi, beta, &cfg())
        .map_err(py_err)?
        .amplitudes()
        .to_vec())
}

/// Two-copy gate matrix U, V, or W.
#[pyfunction]
#[pyo3(signature = (h, kind, eps, sign = 1))]
fn gate_matrix(
    h: &PyHamiltonian,
    kind: &str,
    eps: f64,
    sign: i8,
) -> PyResult<Vec<Vec<Complex64>>> {
    let op = match kind.parse().map_err(py_err)? {
        gates::GateKind::U => gates::gate_u(&h.inner, eps, sign, &cfg()),
        gates::GateKind::V => gates::gate_v(&h.inner, eps, sign, &cfg()),
        gates::GateKind::W => gates::gate_w(&h.inner, eps, &cfg()),
    }
    .map_err(py_err)?;
    Ok(matrix_to_py(op.matrix()))
}

/// SWAP operator between two d-dimensional copies.
#[pyfunction]
fn swap_matrix(d: usize) -> Vec<Vec<Complex64>> {
    matrix_to_py(&gates::swap_op(d))
}

/// Analytic virtual-cooling pipeline.
#[pyfunction]
#[pyo3(signature = (h, eps, n_max, observables = None))]
fn virtual_cool<'py>(
    py: Python<'py>,
    h: &PyHamiltonian,
    eps: f64,
    n_max: u32,
    observables: Option<Vec<Vec<Vec<Complex64>>>>,
) -> PyResult<Bound<'py, PyDict>> {
    let obs: Vec<ComplexMatrix> = match observables {
        Some(list) => list
            .into_iter()
            .map(matrix_from_py)
            .collect::<PyResult<_>>()?,
        None => vec![h.inner.matrix().clone()],
    };
    let r = engines::virtual_cool(&h.inner, eps, n_max, &obs, &cfg()).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("probabilities", r.probabilities.clone())?;
    d.set_item("rho_tilde", matrix_to_py(r.rho_tilde.matrix()))?;
    d.set_item(
        "estimates",
        r.estimates.iter().map(|c| c.values.clone()).collect::<Vec<_>>(),
    )?;
    d.set_item("log_denominators", r.log_denominators.clone())?;
    d.set_item("ground_weight", r.prediction.ground_weight.clone())?;
    d.set_item("lower_bound", r.prediction.lower_bound.clone())?;
    d.set_item("rate", r.prediction.rate)?;
    d.set_item("floor", r.prediction.floor)?;
    d.set_item("degeneracy", r.prediction.degeneracy)?;
    Ok(d)
}

/// Circuit-level check of the virtual-cooling closed form.
#[pyfunction]
fn virtual_cool_oracle(h: &PyHamiltonian, eps: f64) -> PyResult<Vec<Vec<Complex64>>> {
    let rho = engines::brute_force_virtual_cool_oracle(&h.inner, eps, &cfg()).map_err(py_err)?;
    Ok(matrix_to_py(rho.matrix()))
}

/// Tree-recurrence error bound and measured distance.
#[pyfunction]
fn tree_error_bound<'py>(
    py: Python<'py>,
    h: &PyHamiltonian,
    init: &PyInitialState,
    beta: f64,
    n: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let r = tree_bound(&h.inner, &init.inner, beta, n, &cfg()).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("beta", r.beta)?;
    d.set_item("n", r.n)?;
    d.set_item("eps", r.eps)?;
    d.set_item("h_norm", r.h_norm)?;
    d.set_item("sigma_max", r.sigma_max)?;
    d.set_item("b_k", r.b_k)?;
    d.set_item("bound", r.bound)?;
    d.set_item("measured", r.measured)?;
    d.set_item("slack", r.slack)?;
    Ok(d)
}

/// Minimizes a run's output energy over the step size.
#[pyfunction]
#[pyo3(signature = (schedule, h, init, eps_lo = 1e-2, eps_hi = 1.0, rel_tol = 1e-3, grid_points = 25, post_select = false))]
#[allow(clippy::too_many_arguments)]
fn optimize_step<'py>(
    py: Python<'py>,
    schedule: &PySchedule,
    h: &PyHamiltonian,
    init: &PyInitialState,
    eps_lo: f64,
    eps_hi: f64,
    rel_tol: f64,
    grid_points: usize,
    post_select: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let opt = optimize_eps(
        |eps| {
            let r = if post_select {
                engines::run_postselected(
                    &schedule.inner,
                    &h.inner,
                    &init.inner,
                    eps,
                    RunOptions::default(),
                    &cfg(),
                )?
            } else {
                engines::run_statevector(
                    &schedule.inner,
                    &h.inner,
                    &init.inner,
                    eps,
                    RunOptions::default(),
                    &cfg(),
                )?
            };
            Ok(if r.aborted { f64::INFINITY } else { r.energy })
        },
        eps_lo,
        eps_hi,
        rel_tol,
        grid_points,
    )
    .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("eps_star", opt.eps_star)?;
    d.set_item("energy", opt.value)?;
    d.set_item("at_boundary", opt.at_boundary)?;
    d.set_item("refine_iterations", opt.refine_iterations)?;
    Ok(d)
}

#[pymodule]
fn mcqite_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHamiltonian>()?;
    m.add_class::<PyInitialState>()?;
    m.add_class::<PySchedule>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(run_statevector, m)?)?;
    m.add_function(wrap_pyfunction!(run_postselected, m)?)?;
    m.add_function(wrap_pyfunction!(run_tree_recurrence, m)?)?;
    m.add_function(wrap_pyfunction!(imaginary_evolved, m)?)?;
    m.add_function(wrap_pyfunction!(gate_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(swap_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(virtual_cool, m)?)?;
    m.add_function(wrap_pyfunction!(virtual_cool_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(tree_error_bound, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_step, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
