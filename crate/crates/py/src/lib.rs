use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use sphconv_core::certificates::{run_battery as core_battery, BatteryConfig};
use sphconv_core::generators::{generate as core_generate, Family};
use sphconv_core::io::{instance_to_value, parse_instance};
use sphconv_core::oracle::{falsify as core_falsify, run_oracle, OracleConfig};
use sphconv_core::report::verify;

fn value_error(e: sphconv_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Hands a serializable value to Python through `json.loads`.
fn to_python<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[pyclass(name = "QuadraticInstance", frozen)]
struct PyInstance {
    inner: sphconv_core::QuadraticInstance,
}

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (a, b, c = 0.0))]
    fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: f64) -> PyResult<Self> {
        let inner = sphconv_core::QuadraticInstance::new(matrix(&a)?, DVector::from_vec(b), c).map_err(value_error)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (d, b, c = 0.0))]
    fn diagonal(d: Vec<f64>, b: Vec<f64>, c: f64) -> PyResult<Self> {
        let inner = sphconv_core::QuadraticInstance::diagonal(&d, &b, c).map_err(value_error)?;
        Ok(Self { inner })
    }

    /// Parses instance JSON; returns `(instance, cone)`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<(Self, PyCone)> {
        let f = parse_instance(text).map_err(value_error)?;
        Ok((Self { inner: f.instance }, PyCone { inner: f.cone }))
    }

    #[pyo3(signature = (cone = None))]
    fn to_json(&self, cone: Option<&PyCone>) -> String {
        let cone = cone.map_or_else(|| sphconv_core::Cone::orthant(self.inner.n()), |c| c.inner.clone());
        instance_to_value(&self.inner, &cone, None).to_string()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn a(&self) -> Vec<Vec<f64>> {
        let a = self.inner.a();
        (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.inner.b().iter().copied().collect()
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c()
    }

    fn value(&self, x: Vec<f64>) -> PyResult<f64> {
        if x.len() != self.inner.n() {
            return Err(PyValueError::new_err("x has the wrong length"));
        }
        Ok(self.inner.value(&DVector::from_vec(x)))
    }

    fn shift(&self, lam: f64) -> Self {
        Self {
            inner: self.inner.shift(lam),
        }
    }

    fn lambda_min(&self) -> f64 {
        self.inner.lambda_min()
    }

    fn lambda_max(&self) -> f64 {
        self.inner.lambda_max()
    }

    fn __repr__(&self) -> String {
        format!("QuadraticInstance(n={}, c={})", self.inner.n(), self.inner.c())
    }
}

#[pyclass(name = "Cone", frozen)]
struct PyCone {
    inner: sphconv_core::Cone,
}

#[pymethods]
impl PyCone {
    #[staticmethod]
    fn orthant(n: usize) -> Self {
        Self {
            inner: sphconv_core::Cone::orthant(n),
        }
    }

    #[staticmethod]
    fn generated(generators: Vec<Vec<f64>>) -> PyResult<Self> {
        let gens = generators.into_iter().map(DVector::from_vec).collect();
        Ok(Self {
            inner: sphconv_core::Cone::generated(gens).map_err(value_error)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn is_orthant(&self) -> bool {
        self.inner.is_orthant()
    }

    fn contains(&self, x: Vec<f64>) -> bool {
        x.len() == self.inner.dim() && self.inner.contains(&DVector::from_vec(x))
    }
}

fn cone_for(inst: &PyInstance, cone: Option<&PyCone>) -> sphconv_core::Cone {
    cone.map_or_else(|| sphconv_core::Cone::orthant(inst.inner.n()), |c| c.inner.clone())
}

fn unit_pair(inst: &PyInstance, u: Vec<f64>, v: Vec<f64>) -> PyResult<(DVector<f64>, DVector<f64>)> {
    let n = inst.inner.n();
    if u.len() != n || v.len() != n {
        return Err(PyValueError::new_err("vectors have the wrong length"));
    }
    Ok((DVector::from_vec(u), DVector::from_vec(v)))
}

/// `<Au,u> - <Av,v> - <b,v>/2` for unit `u ⟂ v`.
#[pyfunction]
fn foc_slack(inst: &PyInstance, u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    let (u, v) = unit_pair(inst, u, v)?;
    Ok(sphconv_core::foc_slack(&inst.inner, &u, &v))
}

#[pyfunction]
fn soc_slack(inst: &PyInstance, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    let (x, y) = unit_pair(inst, x, y)?;
    Ok(sphconv_core::soc_slack(&inst.inner, &x, &y))
}

/// Minimum of `<Au,u>` over unit `u ⟂ x`.
#[pyfunction]
fn restricted_lambda_min(a: Vec<Vec<f64>>, x: Vec<f64>) -> PyResult<f64> {
    sphconv_core::linalg::restricted_lambda_min(&matrix(&a)?, &DVector::from_vec(x)).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (inst, cone = None, exhaustive = false))]
fn run_battery(py: Python<'_>, inst: &PyInstance, cone: Option<&PyCone>, exhaustive: bool) -> PyResult<Py<PyAny>> {
    let cfg = BatteryConfig {
        exhaustive,
        ..BatteryConfig::default()
    };
    let result = core_battery(&inst.inner, &cone_for(inst, cone), &cfg).map_err(value_error)?;
    to_python(py, &result)
}

/// Oracle only. `budget = 0` checks the structured pairs and nothing else.
#[pyfunction]
#[pyo3(signature = (inst, cone = None, budget = 100_000, seed = 0))]
fn falsify(py: Python<'_>, inst: &PyInstance, cone: Option<&PyCone>, budget: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let cone = cone_for(inst, cone);
    let cfg = OracleConfig {
        pair_budget: budget,
        ..OracleConfig::with_seed(seed)
    };
    let verdict = if budget == 0 {
        core_falsify(&inst.inner, &cone, &cfg)
    } else {
        run_oracle(&inst.inner, &cone, &cfg)
    }
    .map_err(value_error)?;
    to_python(py, &verdict)
}

/// Battery plus oracle; returns the full report as a dict.
#[pyfunction]
#[pyo3(signature = (inst, cone = None, samples = 100_000, seed = 0, tol = 1e-9, exhaustive = false))]
fn check(
    py: Python<'_>,
    inst: &PyInstance,
    cone: Option<&PyCone>,
    samples: usize,
    seed: u64,
    tol: f64,
    exhaustive: bool,
) -> PyResult<Py<PyAny>> {
    let battery = BatteryConfig {
        exhaustive,
        ..BatteryConfig::default()
    };
    let oracle = OracleConfig {
        pair_budget: samples,
        tol,
        ..OracleConfig::with_seed(seed)
    };
    oracle.validate().map_err(value_error)?;
    let report = verify(&inst.inner, &cone_for(inst, cone), &battery, &oracle).map_err(value_error)?;
    to_python(py, &report)
}

/// Returns `(instance, metadata)` for one member of `family`.
#[pyfunction]
#[pyo3(signature = (family, n, seed = 0, convex = true))]
fn generate(py: Python<'_>, family: &str, n: usize, seed: u64, convex: bool) -> PyResult<(PyInstance, Py<PyAny>)> {
    let family: Family = family.parse().map_err(value_error)?;
    let g = core_generate(family, n, seed, convex).map_err(value_error)?;
    Ok((PyInstance { inner: g.instance }, to_python(py, &g.meta)?))
}

#[pymodule]
fn sphconv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyCone>()?;
    m.add_function(wrap_pyfunction!(foc_slack, m)?)?;
    m.add_function(wrap_pyfunction!(soc_slack, m)?)?;
    m.add_function(wrap_pyfunction!(restricted_lambda_min, m)?)?;
    m.add_function(wrap_pyfunction!(run_battery, m)?)?;
    m.add_function(wrap_pyfunction!(falsify, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
