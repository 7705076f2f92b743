//! Python bindings for `hyperthresh`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hyperthresh::experiments::{self, DenoiseConfig, RecoveryConfig};
use hyperthresh::metrics::MetricsRow;
use hyperthresh::{prox, sparsity, BasisSpec, Regime};

fn py_err(e: hyperthresh::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_regime(name: &str) -> PyResult<Regime> {
    match name {
        "classical" => Ok(Regime::Classical),
        "relaxed" => Ok(Regime::Relaxed),
        "unfettered" => Ok(Regime::Unfettered),
        other => Err(PyValueError::new_err(format!("unknown regime {other:?}"))),
    }
}

/// Thresholding operator: hard, soft, springback or l_q.
#[pyclass(name = "ThresholdRule", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyThresholdRule {
    inner: hyperthresh::ThresholdRule,
}

#[pymethods]
impl PyThresholdRule {
    #[staticmethod]
    fn hard(lam: f64) -> PyResult<Self> {
        hyperthresh::ThresholdRule::hard(lam).map(|inner| Self { inner }).map_err(py_err)
    }

    #[staticmethod]
    fn soft(lam: f64) -> PyResult<Self> {
        hyperthresh::ThresholdRule::soft(lam).map(|inner| Self { inner }).map_err(py_err)
    }

    #[staticmethod]
    fn springback(lam: f64, alpha: f64) -> PyResult<Self> {
        hyperthresh::ThresholdRule::springback(lam, alpha).map(|inner| Self { inner }).map_err(py_err)
    }

    #[staticmethod]
    fn newton_lq(lam: f64, q: f64) -> PyResult<Self> {
        hyperthresh::ThresholdRule::newton_lq(lam, q).map(|inner| Self { inner }).map_err(py_err)
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda()
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.kind().label()
    }

    /// `|y|` at and below which the output is zero.
    #[getter]
    fn decision_threshold(&self) -> f64 {
        self.inner.decision_threshold()
    }

    fn apply(&self, y: f64) -> PyResult<f64> {
        self.inner.apply(y).map_err(py_err)
    }

    fn apply_all(&self, ys: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.apply_all(&ys).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("ThresholdRule({}, lam={})", self.inner.kind().label(), self.inner.lambda())
    }
}

/// Hyperinterpolation on an `n_points` Gauss-Legendre rule up to `degree`.
#[pyclass(name = "Hyperinterpolator", frozen)]
struct PyHyperinterpolator {
    inner: hyperthresh::Hyperinterpolator,
}

#[pymethods]
impl PyHyperinterpolator {
    #[new]
    #[pyo3(signature = (n_points, degree, regime = "classical"))]
    fn new(n_points: usize, degree: usize, regime: &str) -> PyResult<Self> {
        if n_points == 0 {
            return Err(PyValueError::new_err("n_points must be positive"));
        }
        let rule = hyperthresh::gauss_legendre(n_points);
        hyperthresh::Hyperinterpolator::new(rule, BasisSpec::new(degree), parse_regime(regime)?)
            .map(|inner| Self { inner })
            .map_err(py_err)
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.inner.rule().nodes().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.rule().weights().to_vec()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.basis().dimension()
    }

    /// Discrete Fourier-Legendre coefficients of samples taken at `nodes`.
    fn coefficients(&self, samples: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.coefficients(&samples).map_err(py_err)
    }

    /// Coefficients after optional thresholding.
    #[pyo3(signature = (samples, rule = None))]
    fn fit(&self, samples: Vec<f64>, rule: Option<PyThresholdRule>) -> PyResult<Vec<f64>> {
        let h = self.inner.fit(&samples, rule.as_ref().map(|r| &r.inner)).map_err(py_err)?;
        Ok(h.coefficients().to_vec())
    }
}

#[pyfunction]
fn gauss_legendre(n_points: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    if n_points == 0 {
        return Err(PyValueError::new_err("n_points must be positive"));
    }
    let rule = hyperthresh::gauss_legendre(n_points);
    Ok((rule.nodes().to_vec(), rule.weights().to_vec()))
}

#[pyfunction]
fn gram_defect(n_points: usize, degree: usize) -> PyResult<f64> {
    if n_points == 0 {
        return Err(PyValueError::new_err("n_points must be positive"));
    }
    Ok(hyperthresh::gram_defect(&hyperthresh::gauss_legendre(n_points), degree))
}

/// `Σ β_ℓ Φ_ℓ(x)` at each point.
#[pyfunction]
fn evaluate(coefficients: Vec<f64>, points: Vec<f64>) -> PyResult<Vec<f64>> {
    let h = hyperthresh::Hyperinterpolant::from_coefficients(coefficients, Regime::Classical).map_err(py_err)?;
    h.evaluate(&points).map_err(py_err)
}

#[pyfunction]
fn lq_prox(y: f64, lam: f64, q: f64) -> PyResult<f64> {
    prox::lq_prox(y, lam, q, prox::NewtonSettings::default()).map_err(py_err)
}

#[pyfunction]
fn newton_threshold_a(lam: f64, q: f64) -> f64 {
    prox::newton_threshold_a(lam, q)
}

#[pyfunction]
fn lambda_star(y: f64, q: f64) -> f64 {
    prox::lambda_star(y, q)
}

#[pyfunction]
fn critical_q() -> PyResult<(f64, f64)> {
    prox::critical_q().map_err(py_err)
}

#[pyfunction]
fn u_vector(alpha: Vec<f64>, q: f64) -> PyResult<Vec<f64>> {
    sparsity::u_vector(&alpha, q).map_err(py_err)
}

#[pyfunction]
fn lambda_for_sparsity(alpha: Vec<f64>, q: f64, k: usize) -> PyResult<f64> {
    sparsity::lambda_for_sparsity(&alpha, q, k).map_err(py_err)
}

#[pyfunction]
fn lambda_top_k(alpha: Vec<f64>, k: usize) -> PyResult<f64> {
    sparsity::lambda_top_k(&alpha, k).map_err(py_err)
}

/// Compound Gaussian plus impulse noise, deterministic in `seed`.
#[pyfunction]
#[pyo3(signature = (n, sigma, impulse = 0.0, seed = 42))]
fn noise(n: usize, sigma: f64, impulse: f64, seed: u64) -> PyResult<Vec<f64>> {
    Ok(hyperthresh::NoiseSpec::new(sigma, impulse, seed).map_err(py_err)?.sample(n))
}

type Rows<'py> = Vec<Bound<'py, PyDict>>;

fn rows_to_py<'py>(py: Python<'py>, rows: &[MetricsRow]) -> PyResult<Vec<Bound<'py, PyDict>>> {
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("method", &r.method)?;
            d.set_item("l2_error", r.l2_error)?;
            d.set_item("max_error", r.max_error)?;
            d.set_item("aisnr_db", r.aisnr_db)?;
            d.set_item("trials", r.trials)?;
            Ok(d)
        })
        .collect()
}

/// Sparse recovery experiment; returns one dict per method.
#[pyfunction]
#[pyo3(signature = (sigma = 0.15, trials = 200, seed = 42, n_points = 301, dim = 250, sparsity = 22, workers = None))]
#[allow(clippy::too_many_arguments)]
fn run_recovery<'py>(
    py: Python<'py>,
    sigma: f64,
    trials: usize,
    seed: u64,
    n_points: usize,
    dim: usize,
    sparsity: usize,
    workers: Option<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = RecoveryConfig {
        sigma,
        trials,
        seed,
        n_points,
        dim,
        sparsity,
        top_k_retention: Some(sparsity),
        workers,
        ..Default::default()
    };
    let report = py.detach(|| experiments::run_recovery(&cfg)).map_err(py_err)?;
    rows_to_py(py, &report.rows)
}

/// Denoising of `exp(-x²)`; returns `(rows, retained indices per method)`.
#[pyfunction]
#[pyo3(signature = (sigma = 0.15, impulse = 0.5, retain = 2, seed = 42))]
fn run_denoise<'py>(
    py: Python<'py>,
    sigma: f64,
    impulse: f64,
    retain: usize,
    seed: u64,
) -> PyResult<(Rows<'py>, Vec<Vec<usize>>)> {
    let cfg = DenoiseConfig { sigma, impulse_a: impulse, retain_k: retain, seed, ..Default::default() };
    let out = experiments::run_denoise(&cfg).map_err(py_err)?;
    Ok((rows_to_py(py, &out.report.rows)?, out.retained))
}

#[pymodule]
fn pyhyperthresh(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyThresholdRule>()?;
    m.add_class::<PyHyperinterpolator>()?;
    m.add_function(wrap_pyfunction!(gauss_legendre, m)?)?;
    m.add_function(wrap_pyfunction!(gram_defect, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(lq_prox, m)?)?;
    m.add_function(wrap_pyfunction!(newton_threshold_a, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_star, m)?)?;
    m.add_function(wrap_pyfunction!(critical_q, m)?)?;
    m.add_function(wrap_pyfunction!(u_vector, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_for_sparsity, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_top_k, m)?)?;
    m.add_function(wrap_pyfunction!(noise, m)?)?;
    m.add_function(wrap_pyfunction!(run_recovery, m)?)?;
    m.add_function(wrap_pyfunction!(run_denoise, m)?)?;
    Ok(())
}
