//! Python bindings. Structured results come back as plain dicts (the same
//! JSON the command-line tool prints, without the schema tag).

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;
use serde::Serialize;

use lhospital::error::Error;
use lhospital::fuzz::{fuzz_theorem, FuzzSpec};
use lhospital::generator::Generator;
use lhospital::io::parse_scalar;
use lhospital::limits::{default_horizon, limit_estimate as core_limit, weighted_mean_ratio as core_wmr, LimitCase};
use lhospital::logops::{self, OperatorKind};
use lhospital::patterns::{self, Direction};
use lhospital::seqcore::{self, ComparisonPolicy, Mode, Scalar, Sign, DEFAULT_EPS};
use lhospital::tankex::{example_sequences, FIGURE_OFFSET};

create_exception!(lhospital_py, TheoremViolated, PyException, "A predicted pattern failed on the data.");
create_exception!(lhospital_py, HypothesisFailed, PyValueError, "The inputs do not meet the hypotheses.");

fn err(e: Error) -> PyErr {
    match e {
        Error::TheoremViolated { .. } => TheoremViolated::new_err(e.to_string()),
        Error::HypothesisFailed(_) => HypothesisFailed::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn policy_for(mode: Mode, eps: Option<f64>) -> ComparisonPolicy {
    match (mode, eps) {
        (Mode::Exact, None) => ComparisonPolicy::exact(),
        (_, e) => ComparisonPolicy::approx(e.unwrap_or(DEFAULT_EPS)),
    }
}

fn parse_mode(s: &str) -> PyResult<Mode> {
    match s {
        "exact" => Ok(Mode::Exact),
        "approx" => Ok(Mode::Approx),
        _ => Err(PyValueError::new_err(format!("mode must be 'exact' or 'approx', got {s:?}"))),
    }
}

fn scalar_from_py(v: &Bound<'_, PyAny>) -> PyResult<Scalar> {
    if let Ok(n) = v.extract::<i64>() {
        return Ok(Scalar::int(n));
    }
    if let Ok(s) = v.extract::<String>() {
        return parse_scalar(&s).map_err(err);
    }
    if let Ok(x) = v.extract::<f64>() {
        return parse_scalar(&format!("{x:?}")).map_err(err);
    }
    Err(PyValueError::new_err("values must be int, float or rational string"))
}

/// Finite sequence on `[a, a + len - 1]`. Integers and strings like "3/4"
/// give exact values; floats give approximate ones. Modes cannot mix.
#[pyclass(name = "Seq", module = "lhospital_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySeq {
    inner: seqcore::Seq,
}

#[pymethods]
impl PySeq {
    #[new]
    #[pyo3(signature = (values, a = 0))]
    fn new(values: &Bound<'_, PyList>, a: i64) -> PyResult<Self> {
        let vals = values.iter().map(|v| scalar_from_py(&v)).collect::<PyResult<Vec<_>>>()?;
        Ok(PySeq { inner: seqcore::Seq::new(a, vals).map_err(err)? })
    }

    #[getter]
    fn a(&self) -> i64 {
        self.inner.a()
    }

    #[getter]
    fn b(&self) -> i64 {
        self.inner.b()
    }

    #[getter]
    fn mode(&self) -> &'static str {
        match self.inner.mode() {
            Mode::Exact => "exact",
            Mode::Approx => "approx",
        }
    }

    /// Values as strings (`p/q` for exact values).
    #[getter]
    fn values(&self) -> Vec<String> {
        self.inner.values().iter().map(|v| v.to_string()).collect()
    }

    fn to_floats(&self) -> Vec<f64> {
        self.inner.to_f64_vec()
    }

    fn to_mode(&self, mode: &str) -> PyResult<Self> {
        Ok(PySeq { inner: self.inner.to_mode(parse_mode(mode)?).map_err(err)? })
    }

    fn delta(&self) -> PyResult<Self> {
        Ok(PySeq { inner: seqcore::delta(&self.inner).map_err(err)? })
    }

    fn reflect_h(&self) -> Self {
        PySeq { inner: seqcore::reflect_h(&self.inner) }
    }

    fn reflect_v(&self) -> Self {
        PySeq { inner: seqcore::reflect_v(&self.inner) }
    }

    fn shift(&self, d: i64) -> Self {
        PySeq { inner: seqcore::shift(&self.inner, d) }
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Seq(a={}, values=[{}])", self.inner.a(), self.values().join(", "))
    }
}

fn wrap(s: seqcore::Seq) -> PySeq {
    PySeq { inner: s }
}

/// `ρ = Δf/Δg` on `[a+1, b]`.
#[pyfunction]
#[pyo3(signature = (f, g, eps = None))]
fn rho(f: &PySeq, g: &PySeq, eps: Option<f64>) -> PyResult<PySeq> {
    let p = policy_for(f.inner.mode(), eps);
    seqcore::rho(&f.inner, &g.inner, &p).map(wrap).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (f, g, eps = None))]
fn ratio(f: &PySeq, g: &PySeq, eps: Option<f64>) -> PyResult<PySeq> {
    let p = policy_for(f.inner.mode(), eps);
    seqcore::ratio(&f.inner, &g.inner, &p).map(wrap).map_err(err)
}

/// Predicted shape of `f/g` ("DownUp" or "UpDown") from the direction of
/// `ρ` ("up"/"down") and the sign of `gΔg` ("pos"/"neg").
#[pyfunction]
fn predict(rho: &str, sign: &str) -> PyResult<String> {
    let d = match rho {
        "up" => Direction::Up,
        "down" => Direction::Down,
        _ => return Err(PyValueError::new_err("rho must be 'up' or 'down'")),
    };
    let s = match sign {
        "pos" => Sign::Positive,
        "neg" => Sign::Negative,
        _ => return Err(PyValueError::new_err("sign must be 'pos' or 'neg'")),
    };
    Ok(format!("{:?}", patterns::table1_predict(d, s)))
}

#[pyfunction]
#[pyo3(signature = (s, eps = None))]
fn classify<'py>(py: Python<'py>, s: &PySeq, eps: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let rep = patterns::classify(&s.inner, &policy_for(s.inner.mode(), eps)).map_err(err)?;
    to_py(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (f, g, eps = None))]
fn verify_theorem<'py>(py: Python<'py>, f: &PySeq, g: &PySeq, eps: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let v = patterns::verify_theorem(&f.inner, &g.inner, &policy_for(f.inner.mode(), eps)).map_err(err)?;
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (f, g, n, eps = None))]
fn identity_check<'py>(py: Python<'py>, f: &PySeq, g: &PySeq, n: i64, eps: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let rep = patterns::identity_check(&f.inner, &g.inner, n, &policy_for(f.inner.mode(), eps)).map_err(err)?;
    to_py(py, &rep)
}

/// `r_{m,n} = (f_n - f_m) / (g_n - g_m)` as a string.
#[pyfunction]
#[pyo3(signature = (f, g, m, n, eps = None))]
fn weighted_mean_ratio(f: &PySeq, g: &PySeq, m: i64, n: i64, eps: Option<f64>) -> PyResult<String> {
    let v = core_wmr(&f.inner, &g.inner, m, n, &policy_for(f.inner.mode(), eps)).map_err(err)?;
    Ok(v.to_string())
}

/// Limit of `f/g` for generator specs such as "poly:1,2" or "geom:1/2".
#[pyfunction]
#[pyo3(signature = (f, g, case = "i", horizon = None, start = 1, mode = "approx", eps = None))]
#[allow(clippy::too_many_arguments)]
fn limit_estimate<'py>(
    py: Python<'py>,
    f: &str,
    g: &str,
    case: &str,
    horizon: Option<i64>,
    start: i64,
    mode: &str,
    eps: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let (fg, gg): (Generator, Generator) = (f.parse().map_err(err)?, g.parse().map_err(err)?);
    let case = match case {
        "i" => LimitCase::GUnbounded,
        "ii" => LimitCase::BothVanish,
        _ => return Err(PyValueError::new_err("case must be 'i' or 'ii'")),
    };
    let mode = parse_mode(mode)?;
    let h = horizon.unwrap_or_else(|| default_horizon(mode));
    let est = core_limit(&fg, &gg, case, start, h, &policy_for(mode, eps)).map_err(err)?;
    to_py(py, &est)
}

#[pyfunction]
#[pyo3(signature = (p, eps = None))]
fn log_shape<'py>(py: Python<'py>, p: &PySeq, eps: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
    let rep = logops::log_shape(&p.inner, &policy_for(p.inner.mode(), eps)).map_err(err)?;
    to_py(py, &rep)
}

/// `L^k p` for `p` on `[0, N]`.
#[pyfunction]
fn apply_l_head(p: &PySeq, k: u64) -> PyResult<PySeq> {
    logops::apply_l_head(&p.inner, k).map(wrap).map_err(err)
}

/// `R^k p` with `p` read as zero past its last index.
#[pyfunction]
fn apply_r_tail(p: &PySeq, k: u64) -> PyResult<PySeq> {
    logops::r_tail_finite(&p.inner, k).map(wrap).map_err(err)
}

#[pyfunction]
fn semigroup_check(p: &PySeq, k1: u64, k2: u64, kind: &str) -> PyResult<bool> {
    let kind = match kind {
        "r" => OperatorKind::RTail,
        "l" => OperatorKind::LHead,
        _ => return Err(PyValueError::new_err("kind must be 'r' or 'l'")),
    };
    Ok(logops::semigroup_check(&p.inner, k1, k2, kind, &ComparisonPolicy::exact()).map_err(err)?.holds)
}

#[pyfunction]
fn check_head_corollary<'py>(py: Python<'py>, p: &PySeq, k: u64) -> PyResult<Bound<'py, PyAny>> {
    let rep = logops::check_head_corollary(&p.inner, k, &ComparisonPolicy::exact()).map_err(err)?;
    to_py(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (instances = 1000, max_len = 40, rho = "either", g_sign = "either", seed = 0))]
fn fuzz<'py>(
    py: Python<'py>,
    instances: u64,
    max_len: usize,
    rho: &str,
    g_sign: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = FuzzSpec {
        instances,
        max_len,
        rho_direction: rho.parse().map_err(err)?,
        g_sign: g_sign.parse().map_err(err)?,
        seed,
    };
    let rep = py.detach(|| fuzz_theorem(&spec)).map_err(err)?;
    to_py(py, &rep)
}

/// Thresholds `α_0..α_max_k` of the factorial example.
#[pyfunction]
#[pyo3(signature = (max_k = 12))]
fn example_thresholds<'py>(py: Python<'py>, max_k: usize) -> PyResult<Bound<'py, PyAny>> {
    let s = example_sequences(max_k.max(1) + 1).map_err(err)?;
    to_py(py, &s.threshold_table(max_k).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (k, window_end = 30))]
fn example_transition<'py>(py: Python<'py>, k: usize, window_end: usize) -> PyResult<Bound<'py, PyAny>> {
    let s = example_sequences(window_end).map_err(err)?;
    to_py(py, &s.pattern_transition_check(k).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (ks = vec![0, 1, 3, 5, 7], window_end = 30, offset = FIGURE_OFFSET))]
fn example_figure_csv(ks: Vec<usize>, window_end: usize, offset: f64) -> PyResult<String> {
    let s = example_sequences(window_end).map_err(err)?;
    Ok(s.figure_table(&ks, offset).map_err(err)?.to_csv())
}

#[pymodule]
fn lhospital_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySeq>()?;
    m.add("TheoremViolated", m.py().get_type::<TheoremViolated>())?;
    m.add("HypothesisFailed", m.py().get_type::<HypothesisFailed>())?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(ratio, m)?)?;
    m.add_function(wrap_pyfunction!(predict, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem, m)?)?;
    m.add_function(wrap_pyfunction!(identity_check, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_mean_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(limit_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(log_shape, m)?)?;
    m.add_function(wrap_pyfunction!(apply_l_head, m)?)?;
    m.add_function(wrap_pyfunction!(apply_r_tail, m)?)?;
    m.add_function(wrap_pyfunction!(semigroup_check, m)?)?;
    m.add_function(wrap_pyfunction!(check_head_corollary, m)?)?;
    m.add_function(wrap_pyfunction!(fuzz, m)?)?;
    m.add_function(wrap_pyfunction!(example_thresholds, m)?)?;
    m.add_function(wrap_pyfunction!(example_transition, m)?)?;
    m.add_function(wrap_pyfunction!(example_figure_csv, m)?)?;
    Ok(())
}
