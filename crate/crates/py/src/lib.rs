//! Python bindings for the W-state expansion simulator.
//!
//! Exposes the state vector, the gate registry, every expansion scheme
//! and the closed-form probability table under the module name
//! `wexpand`. Build with `cargo build --release -p wexpand-py` and place
//! the resulting `libwexpand.so` on `sys.path` as `wexpand.so`.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wexpand_core::schemes::{self, ParallelLayout, WSpec, VERIFY_TOL};
use wexpand_core::state::{ModeId, Polarization, PureState, MAX_QUBITS, TOL};
use wexpand_core::{analysis, gates};

fn err(e: wexpand_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_mode_pols(assignments: Vec<(String, String)>) -> PyResult<Vec<(ModeId, Polarization)>> {
    assignments
        .into_iter()
        .map(|(mode, pol)| Ok((ModeId::from(mode), Polarization::parse(&pol).map_err(err)?)))
        .collect()
}

/// Dense pure state over named polarization modes.
#[pyclass(name = "PureState", module = "wexpand", skip_from_py_object)]
#[derive(Clone)]
struct PyPureState {
    inner: PureState,
}

/// One branch of a projective measurement.
#[pyclass(name = "Measurement", module = "wexpand")]
struct PyMeasurement {
    #[pyo3(get)]
    outcome: String,
    #[pyo3(get)]
    probability: f64,
    state: PureState,
}

#[pymethods]
impl PyMeasurement {
    #[getter]
    fn state(&self) -> PyPureState {
        PyPureState { inner: self.state.clone() }
    }

    fn __repr__(&self) -> String {
        format!("Measurement({} p={:.6})", self.outcome, self.probability)
    }
}

/// Result of one expansion scheme run.
#[pyclass(name = "ExpansionOutcome", module = "wexpand")]
struct PyOutcome {
    inner: schemes::ExpansionOutcome,
}

#[pymethods]
impl PyOutcome {
    #[getter]
    fn state(&self) -> PyPureState {
        PyPureState { inner: self.inner.state.clone() }
    }

    #[getter]
    fn success_probability(&self) -> f64 {
        self.inner.success_probability
    }

    #[getter]
    fn fidelity(&self) -> f64 {
        self.inner.fidelity
    }

    #[getter]
    fn target_modes(&self) -> Vec<String> {
        self.inner.target.modes().iter().map(|m| m.as_str().to_owned()).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "ExpansionOutcome(n={} p={:.6} fidelity={:.6})",
            self.inner.target.n(),
            self.inner.success_probability,
            self.inner.fidelity
        )
    }
}

#[pymethods]
impl PyPureState {
    /// Product state from [(mode, "H"|"V"), ...] assignments.
    #[staticmethod]
    fn basis(assignments: Vec<(String, String)>) -> PyResult<Self> {
        let assignments = parse_mode_pols(assignments)?;
        Ok(PyPureState {
            inner: PureState::basis_state(&assignments).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyPureState {
            inner: PureState::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    #[getter]
    fn modes(&self) -> Vec<String> {
        self.inner.modes().iter().map(|m| m.as_str().to_owned()).collect()
    }

    /// Amplitudes in basis-index order; bit i of the index is mode i.
    #[getter]
    fn amplitudes(&self) -> Vec<Complex64> {
        self.inner.amplitudes().to_vec()
    }

    fn norm_squared(&self) -> f64 {
        self.inner.norm_squared()
    }

    /// Rescales to unit norm, returning the prior squared norm.
    fn renormalize(&mut self) -> PyResult<f64> {
        self.inner.renormalize().map_err(err)
    }

    /// Applies a registry gate ("X", "Z", "H", "F", "CNOT", "CZ", "CH")
    /// to one or two modes; the first mode is the gate's first slot.
    fn apply_gate(&mut self, name: &str, modes: Vec<String>) -> PyResult<()> {
        let gate = gates::lookup(name).map_err(err)?;
        match modes.as_slice() {
            [mode] => self
                .inner
                .apply_1q(&gate, &ModeId::from(mode.as_str()))
                .map_err(err),
            [a, b] => self
                .inner
                .apply_2q(&gate, &ModeId::from(a.as_str()), &ModeId::from(b.as_str()))
                .map_err(err),
            _ => Err(PyValueError::new_err(format!(
                "gate {name} takes 1 or 2 modes, got {}",
                modes.len()
            ))),
        }
    }

    /// Polarization-dependent loss on the listed modes; the state is
    /// left sub-normalized.
    fn pdl_filter(&mut self, modes: Vec<String>) -> PyResult<()> {
        let modes: Vec<ModeId> = modes.into_iter().map(ModeId::from).collect();
        self.inner.pdl_filter(&modes).map_err(err)
    }

    /// Both branches of measuring one mode, as (H, V) records.
    #[pyo3(signature = (mode, remove = false))]
    fn measure(&self, mode: &str, remove: bool) -> PyResult<(PyMeasurement, PyMeasurement)> {
        let (h, v) = self.inner.measure(&ModeId::from(mode), remove).map_err(err)?;
        let wrap = |record: wexpand_core::MeasurementRecord| PyMeasurement {
            outcome: record.outcome.to_string(),
            probability: record.probability,
            state: record.post_state,
        };
        Ok((wrap(h), wrap(v)))
    }

    fn fidelity(&self, other: &PyPureState) -> PyResult<f64> {
        self.inner.fidelity(&other.inner).map_err(err)
    }

    fn tensor(&self, other: &PyPureState) -> PyResult<Self> {
        Ok(PyPureState {
            inner: self.inner.tensor(&other.inner).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("PureState({})", self.inner)
    }
}

fn spec_of(state: &PyPureState) -> PyResult<WSpec> {
    WSpec::new(state.inner.modes().to_vec()).map_err(err)
}

/// Ideal W state on modes "1".."n".
#[pyfunction]
fn ideal_w(n: usize) -> PyResult<PyPureState> {
    let spec = WSpec::numbered(n).map_err(err)?;
    Ok(PyPureState {
        inner: schemes::ideal_w(&spec).map_err(err)?,
    })
}

/// CH then CNOT across (ancilla, input), in place.
#[pyfunction]
fn expansion_block(mut state: PyRefMut<'_, PyPureState>, ancilla: &str, input: &str) -> PyResult<()> {
    schemes::expansion_block(&mut state.inner, &ModeId::from(ancilla), &ModeId::from(input))
        .map_err(err)
}

/// One cascade step W_n -> W_(n+1) on the given state.
#[pyfunction]
fn cascade_step(state: &PyPureState) -> PyResult<PyOutcome> {
    let spec = spec_of(state)?;
    Ok(PyOutcome {
        inner: schemes::cascade_step(state.inner.clone(), &spec).map_err(err)?,
    })
}

/// `steps` cascade steps from the ideal W state of size `start_n`.
#[pyfunction]
fn cascade_expand(start_n: usize, steps: usize) -> PyResult<PyOutcome> {
    Ok(PyOutcome {
        inner: schemes::cascade_expand(start_n, steps).map_err(err)?,
    })
}

/// Deterministic doubling W_n -> W_2n.
#[pyfunction]
fn parallel_double(state: &PyPureState) -> PyResult<PyOutcome> {
    let spec = spec_of(state)?;
    let layout = ParallelLayout::full(&spec);
    Ok(PyOutcome {
        inner: schemes::parallel_double(state.inner.clone(), &spec, &layout).map_err(err)?,
    })
}

/// Partial expansion with blocks on the first k modes.
#[pyfunction]
fn parallel_partial(state: &PyPureState, k: usize) -> PyResult<PyOutcome> {
    let spec = spec_of(state)?;
    let layout = ParallelLayout::leading(&spec, k).map_err(err)?;
    Ok(PyOutcome {
        inner: schemes::parallel_partial(state.inner.clone(), &spec, &layout).map_err(err)?,
    })
}

/// One qubit added to an even-sized W state.
#[pyfunction]
fn odd_add_one(state: &PyPureState) -> PyResult<PyOutcome> {
    let spec = spec_of(state)?;
    Ok(PyOutcome {
        inner: schemes::odd_add_one(state.inner.clone(), &spec).map_err(err)?,
    })
}

/// Projects an even-sized W state down by one qubit; returns the
/// success outcome and the failure-branch state.
#[pyfunction]
fn odd_project(state: &PyPureState) -> PyResult<(PyOutcome, PyPureState)> {
    let spec = spec_of(state)?;
    let (outcome, failure) = schemes::odd_project(state.inner.clone(), &spec).map_err(err)?;
    Ok((PyOutcome { inner: outcome }, PyPureState { inner: failure }))
}

/// True when the state is a faithfully doubled W state (first half of
/// the modes = originals, second half = ancillas).
#[pyfunction]
#[pyo3(signature = (state, tolerance = VERIFY_TOL))]
fn verify_back(state: &PyPureState, tolerance: f64) -> PyResult<bool> {
    let spec = spec_of(state)?;
    schemes::verify_back(&state.inner, &spec, tolerance).map_err(err)
}

#[pyfunction]
fn p_step(n: u64) -> PyResult<f64> {
    analysis::p_step(n).map_err(err)
}

#[pyfunction]
fn p_from_single(k: u64) -> PyResult<f64> {
    analysis::p_from_single(k).map_err(err)
}

#[pyfunction]
fn p_double_cascade(n: u64) -> PyResult<f64> {
    analysis::p_double_cascade(n).map_err(err)
}

#[pyfunction]
fn p_partial(n: u64, k: u64) -> PyResult<f64> {
    analysis::p_partial(n, k).map_err(err)
}

#[pyfunction]
fn p_odd_add(n: u64) -> PyResult<f64> {
    analysis::p_odd_add(n).map_err(err)
}

#[pyfunction]
fn p_odd_project(n: u64) -> PyResult<f64> {
    analysis::p_odd_project(n).map_err(err)
}

/// Analytic-vs-simulated table as a list of dicts.
#[pyfunction]
#[pyo3(signature = (max_n, workers = 1))]
fn cross_validate(py: Python<'_>, max_n: u64, workers: usize) -> PyResult<Vec<Py<PyDict>>> {
    let table = analysis::cross_validate_with_workers(max_n, workers).map_err(err)?;
    table
        .rows
        .iter()
        .map(|row| {
            let entry = PyDict::new(py);
            entry.set_item("scheme", row.scheme.as_str())?;
            entry.set_item("size", row.size)?;
            entry.set_item("analytic", row.analytic)?;
            entry.set_item("simulated", row.simulated)?;
            entry.set_item("abs_delta", row.abs_delta)?;
            Ok(entry.unbind())
        })
        .collect()
}

#[pyfunction]
fn gate_names() -> Vec<String> {
    gates::registry().iter().map(|g| g.name().to_owned()).collect()
}

/// Row-major matrix of a registry gate.
#[pyfunction]
fn gate_matrix(name: &str) -> PyResult<Vec<Vec<Complex64>>> {
    let gate = gates::lookup(name).map_err(err)?;
    Ok((0..gate.dim())
        .map(|r| (0..gate.dim()).map(|c| gate.entry(r, c)).collect())
        .collect())
}

#[pymodule]
fn wexpand(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPureState>()?;
    m.add_class::<PyMeasurement>()?;
    m.add_class::<PyOutcome>()?;
    m.add_function(wrap_pyfunction!(ideal_w, m)?)?;
    m.add_function(wrap_pyfunction!(expansion_block, m)?)?;
    m.add_function(wrap_pyfunction!(cascade_step, m)?)?;
    m.add_function(wrap_pyfunction!(cascade_expand, m)?)?;
    m.add_function(wrap_pyfunction!(parallel_double, m)?)?;
    m.add_function(wrap_pyfunction!(parallel_partial, m)?)?;
    m.add_function(wrap_pyfunction!(odd_add_one, m)?)?;
    m.add_function(wrap_pyfunction!(odd_project, m)?)?;
    m.add_function(wrap_pyfunction!(verify_back, m)?)?;
    m.add_function(wrap_pyfunction!(p_step, m)?)?;
    m.add_function(wrap_pyfunction!(p_from_single, m)?)?;
    m.add_function(wrap_pyfunction!(p_double_cascade, m)?)?;
    m.add_function(wrap_pyfunction!(p_partial, m)?)?;
    m.add_function(wrap_pyfunction!(p_odd_add, m)?)?;
    m.add_function(wrap_pyfunction!(p_odd_project, m)?)?;
    m.add_function(wrap_pyfunction!(cross_validate, m)?)?;
    m.add_function(wrap_pyfunction!(gate_names, m)?)?;
    m.add_function(wrap_pyfunction!(gate_matrix, m)?)?;
    m.add("TOL", TOL)?;
    m.add("VERIFY_TOL", VERIFY_TOL)?;
    m.add("MAX_QUBITS", MAX_QUBITS)?;
    Ok(())
}
