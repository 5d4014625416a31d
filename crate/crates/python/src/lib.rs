//! Python bindings. Results come back as plain dicts and lists built from
//! the same JSON the command-line tool prints.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use serde_json::Value;

use normattain_core::an::{enan_counterexample as enan, sample_subspace_restrictions};
use normattain_core::spec_doc::expr_to_value;
use normattain_core::spectral::norm::NormOptions;
use normattain_core::suite::run_suite;
use normattain_core::{Error, OperatorExpr, Vector};

create_exception!(normattain, NormAttainError, PyException);

fn to_py_err(e: Error) -> PyErr {
    if e.is_parse_error() {
        PyValueError::new_err(format!("{}: {e}", e.kind()))
    } else {
        NormAttainError::new_err(format!("{}: {e}", e.kind()))
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (v.to_string(),))?.unbind())
}

fn serialize<T: serde::Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let value = serde_json::to_value(v).map_err(|e| NormAttainError::new_err(e.to_string()))?;
    to_py(py, &value)
}

/// A bounded operator on l2 described by an expression tree.
#[pyclass(module = "normattain", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Operator {
    expr: OperatorExpr,
}

#[pymethods]
impl Operator {
    /// Parse an operator spec document or a bare expression.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc = normattain_core::parse_spec(text).map_err(to_py_err)?;
        Ok(Operator { expr: doc.operator })
    }

    /// `d x d` dense matrix as a row-major list of complex rows.
    #[staticmethod]
    fn dense(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let m = normattain_core::linalg::CMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let expr = OperatorExpr::dense(m, normattain_core::Tail::Zero).map_err(to_py_err)?;
        Ok(Operator { expr })
    }

    fn to_json(&self) -> String {
        expr_to_value(&self.expr).to_string()
    }

    /// Apply to a finitely supported vector given by its leading coordinates.
    fn apply(&self, x: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let y = self.expr.apply(&Vector::from_dense(&x)).map_err(to_py_err)?;
        Ok(y.to_dense(y.support_max().max(x.len())))
    }

    /// Compression to the first `d` canonical coordinates.
    fn truncate(&self, d: usize) -> PyResult<Vec<Vec<Complex64>>> {
        let m = self.expr.truncate(d).map_err(to_py_err)?;
        Ok((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect())
    }

    fn adjoint(&self) -> Self {
        Operator { expr: self.expr.adjoint() }
    }

    fn __repr__(&self) -> String {
        format!("Operator({})", self.to_json())
    }
}

fn norm_options(dim: usize, tol: f64) -> NormOptions {
    NormOptions { max_dim: dim, tolerance: tol, ..Default::default() }
}

#[pyfunction]
#[pyo3(signature = (op, dim = 256, tol = 1e-10))]
fn operator_norm(py: Python<'_>, op: &Operator, dim: usize, tol: f64) -> PyResult<Py<PyAny>> {
    let r = normattain_core::operator_norm(&op.expr, &norm_options(dim, tol)).map_err(to_py_err)?;
    serialize(py, &r)
}

#[pyfunction]
#[pyo3(signature = (op, dim = 256, tol = 1e-10))]
fn check_n(py: Python<'_>, op: &Operator, dim: usize, tol: f64) -> PyResult<Py<PyAny>> {
    let c = normattain_core::check_n(&op.expr, &norm_options(dim, tol)).map_err(to_py_err)?;
    serialize(py, &c)
}

#[pyfunction]
fn classify_an(py: Python<'_>, op: &Operator) -> PyResult<Py<PyAny>> {
    serialize(py, &normattain_core::classify_an(&op.expr))
}

#[pyfunction]
#[pyo3(signature = (op, dim = 64, trials = 200, seed = 0))]
fn falsify_an(py: Python<'_>, op: &Operator, dim: usize, trials: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let r = sample_subspace_restrictions(&op.expr, dim, trials, seed).map_err(to_py_err)?;
    serialize(py, &r)
}

#[pyfunction]
#[pyo3(signature = (op, n_max = 32, dim = 256, tol = 1e-10))]
fn deflate(py: Python<'_>, op: &Operator, n_max: usize, dim: usize, tol: f64) -> PyResult<Py<PyAny>> {
    let d = normattain_core::deflate(&op.expr, n_max, dim, tol).map_err(to_py_err)?;
    serialize(py, &d.summary())
}

/// Boundary points of the numerical range as `(theta, point)` pairs.
#[pyfunction]
#[pyo3(signature = (op, dim = 256, angles = 360))]
fn numrange_boundary(op: &Operator, dim: usize, angles: usize) -> PyResult<Vec<(f64, Complex64)>> {
    let b = normattain_core::numrange::numrange_boundary(&op.expr, dim, angles).map_err(to_py_err)?;
    Ok(b.points.iter().map(|p| (p.theta, p.point)).collect())
}

/// The projection, the subspace and `|P s^n|^2` for the first `n_max` members
/// of the block-constant family.
#[pyfunction]
#[pyo3(signature = (n_max = 10))]
fn enan_counterexample(py: Python<'_>, n_max: usize) -> PyResult<Py<PyAny>> {
    let e = enan();
    let mut norms = vec![];
    for n in 1..=n_max {
        norms.push(e.norm_sq(n).map_err(to_py_err)?);
    }
    let mut v = serde_json::to_value(&e).map_err(|e| NormAttainError::new_err(e.to_string()))?;
    v["norm_sq"] = Value::from(norms);
    let out = to_py(py, &v)?;
    let restriction = Py::new(py, Operator { expr: e.restriction() })?;
    out.bind(py).set_item("restriction", restriction)?;
    out.bind(py).set_item("projection", Py::new(py, Operator { expr: e.p.clone() })?)?;
    Ok(out)
}

#[pyfunction]
fn paper_suite(py: Python<'_>) -> PyResult<Py<PyAny>> {
    serialize(py, &run_suite())
}

#[pymodule]
#[pyo3(name = "normattain")]
fn normattain_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Operator>()?;
    m.add("NormAttainError", m.py().get_type::<NormAttainError>())?;
    m.add_function(wrap_pyfunction!(operator_norm, m)?)?;
    m.add_function(wrap_pyfunction!(check_n, m)?)?;
    m.add_function(wrap_pyfunction!(classify_an, m)?)?;
    m.add_function(wrap_pyfunction!(falsify_an, m)?)?;
    m.add_function(wrap_pyfunction!(deflate, m)?)?;
    m.add_function(wrap_pyfunction!(numrange_boundary, m)?)?;
    m.add_function(wrap_pyfunction!(enan_counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(paper_suite, m)?)?;
    Ok(())
}
