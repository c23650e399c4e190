//! Python bindings: measures, family oracles, estimation, exact counts,
//! bound maps and the two-sphere solver.

use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;
use serde_json::Value;

use randcount::bounds;
use randcount::estimator::{self, EstimateConfig};
use randcount::exact::{self, Limits};
use randcount::families::{GfMatrix, DEFAULT_PRIME};
use randcount::isoperimetry;
use randcount::{Error, FamilyOracle, Graph, RandomStream, Rank};

const DEFAULT_SEED: u64 = 0x5EED;

fn err(e: Error) -> PyErr {
    if e.is_refusal() || matches!(e, Error::SolverFailure(_)) {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any().unbind()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any().unbind()
            } else {
                n.as_f64()
                    .unwrap_or(f64::NAN)
                    .into_pyobject(py)?
                    .into_any()
                    .unbind()
            }
        }
        // "inf" marks an infinite minimizer
        Value::String(s) if s == "inf" => f64::INFINITY.into_pyobject(py)?.into_any().unbind(),
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn record<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// A symmetric weight law: "logistic", "exponential", "bernoulli" or
/// "truncated:<inner>:<cutoff>".
#[pyclass(name = "Measure", frozen, from_py_object)]
#[derive(Clone)]
struct PyMeasure(randcount::Measure);

#[pymethods]
impl PyMeasure {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        spec.parse().map(PyMeasure).map_err(|e: Error| err(e))
    }

    #[staticmethod]
    fn logistic() -> Self {
        PyMeasure(randcount::Measure::logistic())
    }

    #[staticmethod]
    fn exponential() -> Self {
        PyMeasure(randcount::Measure::exponential())
    }

    #[staticmethod]
    fn bernoulli() -> Self {
        PyMeasure(randcount::Measure::bernoulli())
    }

    #[staticmethod]
    fn truncated(inner: &PyMeasure, cutoff: f64) -> PyResult<Self> {
        randcount::Measure::truncated(inner.0.clone(), cutoff)
            .map(PyMeasure)
            .map_err(err)
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label()
    }

    #[getter]
    fn variance(&self) -> f64 {
        self.0.variance()
    }

    fn cdf(&self, t: f64) -> f64 {
        self.0.cdf(t)
    }

    fn quantile(&self, p: f64) -> PyResult<f64> {
        self.0.quantile(p).map_err(err)
    }

    fn sample(&self, u: f64) -> PyResult<f64> {
        self.0.sample(u).map_err(err)
    }

    fn mgf(&self, delta: f64) -> f64 {
        self.0.mgf(delta)
    }

    fn tail_integral(&self, a: f64) -> f64 {
        self.0.tail_integral(a)
    }

    /// Rate function `h(t)`; closed forms where available.
    fn rate(&self, t: f64) -> f64 {
        bounds::rate(&self.0, t)
    }

    fn g_tau(&self, tau: f64, a: f64) -> f64 {
        bounds::g_tau(&self.0, tau, a)
    }

    fn g_tau_sup(&self, tau: f64) -> f64 {
        bounds::g_tau_sup(&self.0, tau)
    }

    fn __repr__(&self) -> String {
        format!("Measure('{}')", self.0.label())
    }
}

/// A family of subsets of `{0, …, n-1}` behind a max-weight oracle.
#[pyclass(name = "Family", frozen, from_py_object)]
#[derive(Clone)]
struct PyFamily(FamilyOracle);

fn graph(num_vertices: usize, edges: Vec<(usize, usize)>) -> PyResult<Graph> {
    Graph::new(num_vertices, edges).map_err(err)
}

#[pymethods]
impl PyFamily {
    #[staticmethod]
    fn explicit(n: usize, subsets: Vec<Vec<usize>>) -> PyResult<Self> {
        FamilyOracle::explicit(n, subsets)
            .map(PyFamily)
            .map_err(err)
    }

    #[staticmethod]
    fn uniform_matroid(n: usize, k: usize) -> PyResult<Self> {
        FamilyOracle::uniform_matroid(n, k)
            .map(PyFamily)
            .map_err(err)
    }

    /// Spanning trees; vertices are 0-indexed.
    #[staticmethod]
    fn spanning_trees(num_vertices: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        FamilyOracle::spanning_trees(graph(num_vertices, edges)?)
            .map(PyFamily)
            .map_err(err)
    }

    #[staticmethod]
    fn forests(num_vertices: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyFamily(FamilyOracle::forests(graph(num_vertices, edges)?)))
    }

    #[staticmethod]
    fn perfect_matchings(num_vertices: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        FamilyOracle::perfect_matchings(graph(num_vertices, edges)?)
            .map(PyFamily)
            .map_err(err)
    }

    /// Bipartite perfect matchings on the positive entries of a square
    /// matrix, with entries above 1 taken as multiplicities.
    #[staticmethod]
    fn bipartite(matrix: Vec<Vec<i64>>) -> PyResult<Self> {
        let oracle = FamilyOracle::bipartite_from_matrix(&matrix).map_err(err)?;
        Ok(PyFamily(strip_unit(oracle)))
    }

    /// Perfect matchings on the positive entries of a symmetric matrix.
    #[staticmethod]
    fn matchings_from_symmetric(matrix: Vec<Vec<i64>>) -> PyResult<Self> {
        let oracle = FamilyOracle::matchings_from_symmetric(&matrix).map_err(err)?;
        Ok(PyFamily(strip_unit(oracle)))
    }

    /// Bases of the column matroid of an integer matrix over GF(prime).
    #[staticmethod]
    #[pyo3(signature = (rows, prime = DEFAULT_PRIME))]
    fn linear_matroid(rows: Vec<Vec<i64>>, prime: u64) -> PyResult<Self> {
        Ok(PyFamily(FamilyOracle::linear_matroid(
            GfMatrix::from_rows(&rows, prime).map_err(err)?,
        )))
    }

    #[staticmethod]
    fn cube_face(dim: usize) -> PyResult<Self> {
        FamilyOracle::cube_face(dim).map(PyFamily).map_err(err)
    }

    #[staticmethod]
    fn product(children: Vec<PyFamily>) -> PyResult<Self> {
        FamilyOracle::product(children.into_iter().map(|c| c.0).collect())
            .map(PyFamily)
            .map_err(err)
    }

    fn with_multiplicities(&self, q: Vec<u32>) -> PyResult<Self> {
        self.0
            .clone()
            .with_multiplicities(q)
            .map(PyFamily)
            .map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    /// `k` for families whose members have (at most) `k` elements.
    #[getter]
    fn rank(&self) -> Option<usize> {
        self.0.rank().bound()
    }

    #[getter]
    fn multiplicities(&self) -> Option<Vec<u32>> {
        self.0.multiplicities().map(<[u32]>::to_vec)
    }

    fn max_weight(&self, c: Vec<f64>) -> PyResult<f64> {
        self.0.max_weight(&c).map_err(err)
    }

    #[pyo3(signature = (budget = 1_000_000))]
    fn members(&self, budget: u64) -> PyResult<Vec<Vec<usize>>> {
        self.0.enumerate(budget).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Family('{}')", self.0.descriptor())
    }
}

fn strip_unit(oracle: FamilyOracle) -> FamilyOracle {
    match oracle.multiplicities() {
        Some(q) if q.iter().all(|&x| x == 1) => oracle.without_multiplicities(),
        _ => oracle,
    }
}

/// Plain mean of `m` oracle values.
#[pyfunction]
#[pyo3(signature = (family, measure, m, seed = DEFAULT_SEED))]
fn estimate_gamma(
    py: Python<'_>,
    family: &PyFamily,
    measure: &PyMeasure,
    m: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let e = py
        .detach(|| estimator::estimate_gamma(&family.0, &measure.0, m, &RandomStream::new(seed)))
        .map_err(err)?;
    record(py, &e)
}

/// Median-of-means estimate of Γ and the resulting bounds on ln |X|, or on
/// ln of the multiplicity polynomial when the family carries multiplicities.
#[pyfunction]
#[pyo3(signature = (family, measure, eps = 0.5, delta = 0.1, seed = DEFAULT_SEED, m = None, runs = None, z = 3.0))]
#[allow(clippy::too_many_arguments)]
fn estimate(
    py: Python<'_>,
    family: &PyFamily,
    measure: &PyMeasure,
    eps: f64,
    delta: f64,
    seed: u64,
    m: Option<usize>,
    runs: Option<usize>,
    z: f64,
) -> PyResult<Py<PyAny>> {
    let config = EstimateConfig {
        eps,
        delta_fail: delta,
        m_override: m,
        runs_override: runs,
        z,
        ..EstimateConfig::default()
    };
    let e = py
        .detach(|| {
            estimator::estimate_ln_count(&family.0, &measure.0, &config, &RandomStream::new(seed))
        })
        .map_err(err)?;
    record(py, &e)
}

/// Exact `|X|`, or the multiplicity polynomial, as a Python integer.
#[pyfunction]
fn exact_count(py: Python<'_>, family: &PyFamily) -> PyResult<BigUint> {
    let limits = Limits::from_env().map_err(err)?;
    let count = py
        .detach(|| exact::polynomial_exact(&family.0, &limits))
        .map_err(err)?;
    Ok(count.value)
}

/// Γ under the ±1 sign measure by enumerating all sign vectors.
#[pyfunction]
#[pyo3(signature = (family, cap = 14))]
fn gamma_exact_bernoulli(family: &PyFamily, cap: usize) -> PyResult<f64> {
    exact::gamma_exact_bernoulli(&family.0, cap).map_err(err)
}

/// Bounds on ln |X| from a value of Γ.
#[pyfunction]
#[pyo3(signature = (measure, gamma, k = None, at_most = false, n = 0, slack = 0.0))]
fn count_bounds(
    py: Python<'_>,
    measure: &PyMeasure,
    gamma: f64,
    k: Option<usize>,
    at_most: bool,
    n: usize,
    slack: f64,
) -> PyResult<Py<PyAny>> {
    let rank = match (k, at_most) {
        (Some(k), false) => Rank::Uniform(k),
        (Some(k), true) => Rank::AtMost(k),
        (None, _) => Rank::Mixed,
    };
    record(
        py,
        &bounds::count_bounds(&measure.0, gamma, slack, n.max(k.unwrap_or(0)), rank),
    )
}

/// Two-sphere solution of the inverse isoperimetric problem at entropy `alpha`.
#[pyfunction]
fn solve_two_spheres(py: Python<'_>, measure: &PyMeasure, alpha: f64) -> PyResult<Py<PyAny>> {
    let s = isoperimetry::solve_two_spheres(&measure.0, alpha).map_err(err)?;
    record(py, &s)
}

#[pymodule]
#[pyo3(name = "randcount")]
fn randcount_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMeasure>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(estimate_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(exact_count, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_exact_bernoulli, m)?)?;
    m.add_function(wrap_pyfunction!(count_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(solve_two_spheres, m)?)?;
    Ok(())
}
