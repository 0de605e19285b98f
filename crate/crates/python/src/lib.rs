//! Python bindings. Structured results come back as plain dicts (via JSON), so
//! non-finite reals appear as the strings `"inf"`, `"-inf"` and `"nan"`, the
//! same as in the CLI output.

// the pyo3 0.22 macros trip this lint on every fallible signature
#![allow(clippy::useless_conversion)]

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use catnoise_core::cat_algebra::{self, CutSpec};
use catnoise_core::criteria;
use catnoise_core::oracle;
use catnoise_core::sweep::{self, SweepConfig};
use catnoise_core::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::EigenNoConvergence | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let json = py.import_bound("json")?;
    Ok(json.call_method1("loads", (text,))?.unbind())
}

fn cut(n: u64, k: u64) -> PyResult<CutSpec> {
    CutSpec::new(n, k).map_err(py_err)
}

/// Single-qubit Pauli channel `(pi0, pi1, pi2, pi3)`.
#[pyclass(name = "PauliChannel", module = "catnoise", frozen)]
#[derive(Clone)]
struct PyChannel(catnoise_core::PauliChannel);

#[pymethods]
impl PyChannel {
    #[new]
    fn new(pi0: f64, pi1: f64, pi2: f64, pi3: f64) -> PyResult<Self> {
        catnoise_core::PauliChannel::new([pi0, pi1, pi2, pi3])
            .map(Self)
            .map_err(py_err)
    }

    #[staticmethod]
    fn identity() -> Self {
        Self(catnoise_core::PauliChannel::identity())
    }

    /// `family` is `"depolarizing"` or `"dephasing"`; `strength` is `pi0`.
    #[staticmethod]
    fn preset(family: &str, strength: f64) -> PyResult<Self> {
        catnoise_core::PauliChannel::preset_by_name(family, strength)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn probabilities(&self) -> (f64, f64, f64, f64) {
        let [a, b, c, d] = self.0.probabilities();
        (a, b, c, d)
    }

    /// `(a, b, c, d)`.
    fn params(&self) -> (f64, f64, f64, f64) {
        let p = self.0.params();
        (p.a, p.b, p.c, p.d)
    }

    fn __repr__(&self) -> String {
        let [a, b, c, d] = self.0.probabilities();
        format!("PauliChannel({a}, {b}, {c}, {d})")
    }
}

#[pyfunction]
fn delta(ch: &PyChannel, n: u64) -> f64 {
    cat_algebra::delta(&ch.0.params(), n)
}

#[pyfunction]
fn two_lambda(ch: &PyChannel, n: u64, k: u64) -> PyResult<f64> {
    Ok(cat_algebra::two_lambda(&ch.0.params(), cut(n, k)?))
}

#[pyfunction]
fn cat_populations(py: Python<'_>, ch: &PyChannel, n: u64, k: u64) -> PyResult<PyObject> {
    to_py(py, &cat_algebra::cat_populations(&ch.0.params(), n, k).map_err(py_err)?)
}

#[pyfunction]
fn cut_verdict(py: Python<'_>, ch: &PyChannel, n: u64, k: u64) -> PyResult<PyObject> {
    to_py(py, &criteria::cut_verdict(&ch.0.params(), cut(n, k)?))
}

#[pyfunction]
fn min_entangled_k(ch: &PyChannel, n: u64) -> PyResult<Option<u64>> {
    criteria::min_entangled_k(&ch.0.params(), n).map_err(py_err)
}

#[pyfunction]
fn max_distillable_m(py: Python<'_>, ch: &PyChannel, n: u64) -> PyResult<PyObject> {
    to_py(py, &criteria::max_distillable_m(&ch.0.params(), n).map_err(py_err)?)
}

#[pyfunction]
fn asymptotic_report(py: Python<'_>, ch: &PyChannel) -> PyResult<PyObject> {
    let r = criteria::asymptotic_report(&ch.0.params());
    let out = to_py(py, &r)?;
    let dict = out.downcast_bound::<PyDict>(py)?;
    dict.set_item("asymptotic_max_m", r.asymptotic_max_m())?;
    Ok(out)
}

#[pyfunction]
fn finite_n_condition(py: Python<'_>, ch: &PyChannel, n: u64, k: u64) -> PyResult<PyObject> {
    to_py(py, &criteria::finite_n_condition(&ch.0.params(), cut(n, k)?).map_err(py_err)?)
}

/// Smallest eigenvalue of the partial transpose over the first `k` qubits of
/// the dense `n`-qubit state, and whether it is negative.
#[pyfunction]
fn oracle_cut(py: Python<'_>, ch: &PyChannel, n: usize, k: usize) -> PyResult<(f64, bool)> {
    let ch = ch.0;
    py.allow_threads(|| {
        let state = oracle::decohere_all(n, &ch)?;
        let pt = oracle::oracle_cut_verdict(&state, k)?;
        Ok((pt.min_eigenvalue, pt.nppt))
    })
    .map_err(py_err)
}

#[pyfunction]
fn analyze(py: Python<'_>, ch: &PyChannel, n: u64) -> PyResult<PyObject> {
    to_py(py, &sweep::run_analyze(&ch.0, n).map_err(py_err)?)
}

/// Runs a sweep from a JSON config document and returns the rows as dicts.
#[pyfunction]
fn run_sweep(py: Python<'_>, config: &str) -> PyResult<PyObject> {
    let resolved = SweepConfig::from_json(config)
        .and_then(|c| c.resolve())
        .map_err(py_err)?;
    let rows = py.allow_threads(|| sweep::run_sweep(&resolved)).map_err(py_err)?;
    to_py(py, &rows)
}

/// Oracle campaign from a JSON config document; returns the full report.
#[pyfunction]
fn run_verify(py: Python<'_>, config: &str) -> PyResult<PyObject> {
    let mut cfg = SweepConfig::from_json(config).map_err(py_err)?;
    cfg.oracle = true;
    let resolved = cfg.resolve().map_err(py_err)?;
    let report = py.allow_threads(|| sweep::run_verify(&resolved)).map_err(py_err)?;
    to_py(py, &report)
}

#[pymodule]
fn catnoise(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChannel>()?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(two_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(cat_populations, m)?)?;
    m.add_function(wrap_pyfunction!(cut_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(min_entangled_k, m)?)?;
    m.add_function(wrap_pyfunction!(max_distillable_m, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_report, m)?)?;
    m.add_function(wrap_pyfunction!(finite_n_condition, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_cut, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_verify, m)?)?;
    m.add("N_MAX", oracle::N_MAX)?;
    Ok(())
}
