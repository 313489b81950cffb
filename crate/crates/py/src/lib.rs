//! Python bindings for the double-sequence toolkit.
//!
//! Sequences and matrices are built from the same JSON specs the CLI takes;
//! reports come back as plain Python dicts (the JSON form of the Rust
//! report types), so the Python side needs no wrapper classes for them.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};

use dseq_core::convergence::{certify_rule, lq_norm_delta, sup_norm_delta};
use dseq_core::difference::apply_4d;
use dseq_core::duality::{alpha_pairing_abs, check_f1, check_f2, check_f3, DualConditionReport};
use dseq_core::json::{mat_from_str, seq_from_str};
use dseq_core::matclass::{check_class, ClassId};
use dseq_core::seq::DoubleSequence;
use dseq_core::spaces::{member as member_of, run_atlas, SpaceId};
use dseq_core::window::Window;
use dseq_core::{Error, Rule, RunConfig, Scalar};

fn to_py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_config(config: Option<&str>) -> PyResult<RunConfig> {
    match config {
        Some(text) => RunConfig::from_json(text).map_err(to_py_err),
        None => Ok(RunConfig::default()),
    }
}

fn scalar_to_py(py: Python<'_>, s: Scalar) -> PyResult<Py<PyAny>> {
    Ok(match s {
        Scalar::Int(v) => v.into_pyobject(py)?.into_any().unbind(),
        Scalar::Float(v) => v.into_pyobject(py)?.into_any().unbind(),
    })
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any().unbind(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any().unbind()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind()
            }
        }
        serde_json::Value::String(s) => PyString::new(py, s).into_any().unbind(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn report_to_py<T: serde::Serialize>(py: Python<'_>, report: &T) -> PyResult<Py<PyAny>> {
    let value = serde_json::to_value(report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &value)
}

/// A double sequence built from a JSON spec.
#[pyclass(name = "Sequence")]
struct PySequence {
    inner: DoubleSequence,
}

#[pymethods]
impl PySequence {
    /// Build from a JSON spec: closed_form, table, or combinator.
    #[staticmethod]
    fn from_json(spec: &str) -> PyResult<PySequence> {
        Ok(PySequence { inner: seq_from_str(spec).map_err(to_py_err)? })
    }

    /// Value at (m, n); negative indices are 0 by zero-extension.
    fn eval(&self, py: Python<'_>, m: i64, n: i64) -> PyResult<Py<PyAny>> {
        scalar_to_py(py, self.inner.eval(m, n).map_err(to_py_err)?)
    }

    /// The difference transform Δx as a new sequence.
    fn delta(&self) -> PySequence {
        PySequence { inner: self.inner.delta() }
    }

    /// The inverse transform Sx (rectangular prefix sums).
    fn inv_delta(&self) -> PySequence {
        PySequence { inner: self.inner.prefix_sum() }
    }

    /// Materialize a rows x cols table as nested lists.
    fn table(&self, py: Python<'_>, rows: usize, cols: usize) -> PyResult<Py<PyAny>> {
        if rows == 0 || cols == 0 {
            return Err(PyValueError::new_err("table needs positive sizes"));
        }
        let w = Window { m_max: rows - 1, n_max: cols - 1 };
        let cap = RunConfig::default().cell_cap;
        let t = self.inner.table(w, cap).map_err(to_py_err)?;
        let out = PyList::empty(py);
        for m in 0..rows {
            let row = PyList::empty(py);
            for n in 0..cols {
                row.append(scalar_to_py(py, t.get(m, n))?)?;
            }
            out.append(row)?;
        }
        Ok(out.into_any().unbind())
    }

    fn describe(&self) -> String {
        self.inner.describe()
    }

    fn value_kind(&self) -> String {
        match serde_json::to_value(self.inner.kind()) {
            Ok(serde_json::Value::String(s)) => s,
            _ => "unknown".into(),
        }
    }

    fn __repr__(&self) -> String {
        format!("Sequence({})", self.inner.describe())
    }
}

/// A 4-D matrix built from a JSON spec.
#[pyclass(name = "Matrix")]
struct PyMatrix {
    inner: dseq_core::FourDimMatrix,
}

#[pymethods]
impl PyMatrix {
    /// Build from a JSON spec: builtin, entries, or row_family.
    #[staticmethod]
    fn from_json(spec: &str) -> PyResult<PyMatrix> {
        Ok(PyMatrix { inner: mat_from_str(spec).map_err(to_py_err)? })
    }

    /// Entry a_{mnkl}.
    fn entry(&self, py: Python<'_>, m: usize, n: usize, k: usize, l: usize) -> PyResult<Py<PyAny>> {
        scalar_to_py(py, self.inner.entry(m, n, k, l))
    }

    fn describe(&self) -> String {
        self.inner.describe()
    }

    fn __repr__(&self) -> String {
        format!("Matrix({})", self.inner.describe())
    }
}

/// Position of the 1-based pair (m, n) in the square-shell enumeration.
#[pyfunction]
fn phi(m: u64, n: u64) -> PyResult<u64> {
    dseq_core::zmap::phi(m, n).map_err(to_py_err)
}

/// The unique (m, n) with phi(m, n) = i.
#[pyfunction]
fn phi_inv(i: u64) -> PyResult<(u64, u64)> {
    dseq_core::zmap::phi_inv(i).map_err(to_py_err)
}

/// First `count` entries of the flattened sequence.
#[pyfunction]
fn flatten(py: Python<'_>, seq: &PySequence, count: usize) -> PyResult<Py<PyAny>> {
    let values = dseq_core::zmap::flatten(&seq.inner, count).map_err(to_py_err)?;
    let out = PyList::empty(py);
    for v in values {
        out.append(scalar_to_py(py, v)?)?;
    }
    Ok(out.into_any().unbind())
}

/// Certify a rule-v limit ("p", "bp", or "r"); returns the report dict.
#[pyfunction]
#[pyo3(signature = (seq, rule, config=None))]
fn limit(py: Python<'_>, seq: &PySequence, rule: &str, config: Option<&str>) -> PyResult<Py<PyAny>> {
    let rule: Rule = rule.parse().map_err(to_py_err)?;
    let cfg = parse_config(config)?;
    report_to_py(py, &certify_rule(&seq.inner, rule, &cfg).map_err(to_py_err)?)
}

/// Certified membership of a sequence in a space ("Mu", "Cp", "Lq(2)", ...).
#[pyfunction]
#[pyo3(signature = (seq, space, config=None))]
fn member(py: Python<'_>, seq: &PySequence, space: &str, config: Option<&str>) -> PyResult<Py<PyAny>> {
    let space: SpaceId = space.parse().map_err(to_py_err)?;
    let cfg = parse_config(config)?;
    report_to_py(py, &member_of(&seq.inner, space, &cfg).map_err(to_py_err)?)
}

/// Norm certifier: kind "sup_delta" or "lq_delta" (with exponent q).
#[pyfunction]
#[pyo3(signature = (seq, kind, q=None, config=None))]
fn norm(
    py: Python<'_>,
    seq: &PySequence,
    kind: &str,
    q: Option<f64>,
    config: Option<&str>,
) -> PyResult<Py<PyAny>> {
    let cfg = parse_config(config)?;
    let report = match kind {
        "sup_delta" => sup_norm_delta(&seq.inner, &cfg).map_err(to_py_err)?,
        "lq_delta" => {
            let q = q.ok_or_else(|| PyValueError::new_err("lq_delta needs q"))?;
            lq_norm_delta(&seq.inner, q, &cfg).map_err(to_py_err)?
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown norm kind `{other}` (expected sup_delta|lq_delta)"
            )))
        }
    };
    report_to_py(py, &report)
}

/// Dual-space condition: "F1", "F2", "F3" (with cut), or "alpha" (with x).
#[pyfunction]
#[pyo3(signature = (a, check, x=None, cut=0, config=None))]
fn dual(
    py: Python<'_>,
    a: &PySequence,
    check: &str,
    x: Option<&PySequence>,
    cut: usize,
    config: Option<&str>,
) -> PyResult<Py<PyAny>> {
    let cfg = parse_config(config)?;
    let report = match check {
        "F1" => check_f1(&a.inner, &cfg).map_err(to_py_err)?,
        "F2" => check_f2(&a.inner, cut, &cfg).map_err(to_py_err)?,
        "F3" => check_f3(&a.inner, cut, &cfg).map_err(to_py_err)?,
        "alpha" => {
            let x = x.ok_or_else(|| PyValueError::new_err("alpha needs x"))?;
            let rep = alpha_pairing_abs(&a.inner, &x.inner, &cfg).map_err(to_py_err)?;
            DualConditionReport {
                condition: "alpha".into(),
                verdict: rep.verdict.into(),
                value: rep.limit,
                report: rep,
            }
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown dual check `{other}` (expected F1|F2|F3|alpha)"
            )))
        }
    };
    report_to_py(py, &report)
}

/// Matrix-class battery; class ids as in the CLI ("Cr_to_Cr", "domain", ...).
#[pyfunction]
#[pyo3(signature = (matrix, class_id, config=None))]
fn matclass(
    py: Python<'_>,
    matrix: &PyMatrix,
    class_id: &str,
    config: Option<&str>,
) -> PyResult<Py<PyAny>> {
    let class: ClassId = class_id.parse().map_err(to_py_err)?;
    let cfg = parse_config(config)?;
    report_to_py(py, &check_class(&matrix.inner, class, &cfg).map_err(to_py_err)?)
}

/// Apply a 4-D matrix to a sequence under a rule over a rows x cols window.
#[pyfunction]
#[pyo3(signature = (matrix, seq, rule, rows, cols, config=None))]
fn apply(
    py: Python<'_>,
    matrix: &PyMatrix,
    seq: &PySequence,
    rule: &str,
    rows: usize,
    cols: usize,
    config: Option<&str>,
) -> PyResult<Py<PyAny>> {
    if rows == 0 || cols == 0 {
        return Err(PyValueError::new_err("window needs positive sizes"));
    }
    let rule: Rule = rule.parse().map_err(to_py_err)?;
    let cfg = parse_config(config)?;
    let w = Window { m_max: rows - 1, n_max: cols - 1 };
    report_to_py(py, &apply_4d(&matrix.inner, &seq.inner, rule, w, &cfg).map_err(to_py_err)?)
}

/// Run the strict-inclusion witness atlas.
#[pyfunction]
#[pyo3(signature = (config=None))]
fn atlas(py: Python<'_>, config: Option<&str>) -> PyResult<Py<PyAny>> {
    let cfg = parse_config(config)?;
    report_to_py(py, &run_atlas(&cfg).map_err(to_py_err)?)
}

#[pymodule]
fn dseq_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySequence>()?;
    m.add_class::<PyMatrix>()?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(phi_inv, m)?)?;
    m.add_function(wrap_pyfunction!(flatten, m)?)?;
    m.add_function(wrap_pyfunction!(limit, m)?)?;
    m.add_function(wrap_pyfunction!(member, m)?)?;
    m.add_function(wrap_pyfunction!(norm, m)?)?;
    m.add_function(wrap_pyfunction!(dual, m)?)?;
    m.add_function(wrap_pyfunction!(matclass, m)?)?;
    m.add_function(wrap_pyfunction!(apply, m)?)?;
    m.add_function(wrap_pyfunction!(atlas, m)?)?;
    Ok(())
}
