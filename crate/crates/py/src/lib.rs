//! Python bindings for `passage-core`.

use num_complex::Complex64;
use pyo3::exceptions::{PyNotImplementedError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use passage_core::cli::{self, Overrides};
use passage_core::decompose::{
    build_decomposition, delta as delta_core, laplace_bound as laplace_core, DecompositionSide,
};
use passage_core::estimate::{fit_exponent as fit_core, SurvivalEstimate, SurvivalRun};
use passage_core::fluctuation::{kappa as kappa_core, PositivityProfile};
use passage_core::levymodel::{
    characteristic_exponent, validate_model, Boundary as CoreBoundary, BoundaryKind, LevyModel as CoreModel,
    ValidationMode,
};
use passage_core::passage::{brownian_integral_test, Classification, TestFunction};
use passage_core::rng::StreamId;
use passage_core::rvcalc::{RegVaryingTail, Side, SlowlyVarying};
use passage_core::simulate::{process_for_model, GridPolicy};
use passage_core::stable::{positivity_parameter, sample_stable, StableParams as CoreStable};
use passage_core::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Unsupported(m) => PyNotImplementedError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Stable law `S(α, β, scale)`.
#[pyclass(name = "StableParams", frozen)]
struct StableParams {
    inner: CoreStable,
}

#[pymethods]
impl StableParams {
    #[new]
    #[pyo3(signature = (alpha, beta = 0.0, scale = 1.0))]
    fn new(alpha: f64, beta: f64, scale: f64) -> PyResult<Self> {
        Ok(Self { inner: CoreStable::new(alpha, beta, scale).map_err(py_err)? })
    }

    /// Law whose Lévy density is `c₊ x^{-α-1}` on the right and `c₋ |x|^{-α-1}` on the left.
    #[staticmethod]
    fn from_levy_constants(alpha: f64, c_plus: f64, c_minus: f64) -> PyResult<Self> {
        Ok(Self { inner: CoreStable::from_levy_constants(alpha, c_plus, c_minus).map_err(py_err)? })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    #[getter]
    fn scale(&self) -> f64 {
        self.inner.scale
    }

    fn levy_constants(&self) -> (f64, f64) {
        self.inner.levy_constants()
    }

    fn positivity(&self) -> PyResult<f64> {
        positivity_parameter(&self.inner).map_err(py_err)
    }

    fn characteristic_exponent(&self, u: f64) -> Complex64 {
        let (re, im) = self.inner.characteristic_exponent(u);
        Complex64::new(re, im)
    }

    #[pyo3(signature = (n, seed, index = 0))]
    fn sample(&self, n: usize, seed: u64, index: u64) -> PyResult<Vec<f64>> {
        sample_stable(&self.inner, n, StreamId::new(seed, index)).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("StableParams(alpha={}, beta={}, scale={})", self.inner.alpha, self.inner.beta, self.inner.scale)
    }
}

/// Lévy process given by its triplet.
#[pyclass(name = "LevyModel", frozen)]
struct LevyModel {
    inner: CoreModel,
}

#[pymethods]
impl LevyModel {
    /// Strictly stable process, simulated exactly.
    #[staticmethod]
    fn stable(params: PyRef<'_, StableParams>) -> PyResult<Self> {
        Ok(Self { inner: CoreModel::strictly_stable(params.inner).map_err(py_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (sigma2, drift = 0.0))]
    fn brownian(sigma2: f64, drift: f64) -> PyResult<Self> {
        let inner = CoreModel::brownian(sigma2, drift);
        inner.check().map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Triplet `(b, σ², ν)` with regularly varying tails of index `alpha`.
    /// A side is present when its constant is given; `ell_p` switches both
    /// sides to `ℓ(x) = (ln(e + 1/x))^p` (the constants then only select sides).
    #[staticmethod]
    #[pyo3(signature = (alpha, b = 0.0, sigma2 = 0.0, c_minus = None, c_plus = None, ell_p = None))]
    fn from_tails(
        alpha: f64,
        b: f64,
        sigma2: f64,
        c_minus: Option<f64>,
        c_plus: Option<f64>,
        ell_p: Option<f64>,
    ) -> PyResult<Self> {
        let tail = |c: Option<f64>, side| -> PyResult<Option<RegVaryingTail>> {
            let Some(c) = c else { return Ok(None) };
            let ell = match ell_p {
                Some(p) => SlowlyVarying::LogPower { p },
                None => SlowlyVarying::Constant { c },
            };
            RegVaryingTail::new(alpha, ell, side).map(Some).map_err(py_err)
        };
        let inner = CoreModel::from_tails(b, sigma2, tail(c_minus, Side::Left)?, tail(c_plus, Side::Right)?);
        inner.check().map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn alpha(&self) -> Option<f64> {
        self.inner.alpha()
    }

    fn rho(&self) -> PyResult<f64> {
        self.inner.rho().map_err(py_err)
    }

    fn characteristic_exponent(&self, u: f64) -> PyResult<Complex64> {
        characteristic_exponent(&self.inner, u).map_err(py_err)
    }

    /// List of `(field, message, severity)`; `theorem=True` adds the checks
    /// needed for the moving-boundary exponents.
    #[pyo3(signature = (theorem = false))]
    fn validate(&self, theorem: bool) -> Vec<(String, String, String)> {
        let mode = if theorem { ValidationMode::Theorem } else { ValidationMode::General };
        validate_model(&self.inner, mode)
            .violations
            .into_iter()
            .map(|v| (v.field, v.message, format!("{:?}", v.severity).to_lowercase()))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("LevyModel({:?})", self.inner)
    }
}

/// `level`, `level − t^γ` or `level + t^γ`.
#[pyclass(name = "Boundary", frozen)]
struct Boundary {
    inner: CoreBoundary,
}

#[pymethods]
impl Boundary {
    #[new]
    #[pyo3(signature = (kind, gamma = 0.0, level = 1.0))]
    fn new(kind: &str, gamma: f64, level: f64) -> PyResult<Self> {
        let inner = match kind {
            "constant" => CoreBoundary::constant(level),
            "decreasing" => CoreBoundary::decreasing(gamma, level),
            "increasing" => CoreBoundary::increasing(gamma, level),
            _ => return Err(PyValueError::new_err(format!("unknown boundary kind {kind:?}"))),
        };
        Ok(Self { inner })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner.kind {
            BoundaryKind::Constant => "constant",
            BoundaryKind::Decreasing => "decreasing",
            BoundaryKind::Increasing => "increasing",
        }
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn level(&self) -> f64 {
        self.inner.level
    }

    fn __repr__(&self) -> String {
        self.inner.label()
    }
}

fn estimate_dict<'py>(py: Python<'py>, e: &SurvivalEstimate) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("T", e.t)?;
    d.set_item("n_paths", e.n_paths)?;
    d.set_item("survivors", e.survivors)?;
    d.set_item("p_hat", e.p_hat)?;
    d.set_item("log_ci", e.log_ci)?;
    d.set_item("seed", e.seed)?;
    Ok(d)
}

/// Survival estimates `[boundary][horizon]` on shared paths, monitored on a
/// geometric grid (`refine` points below `dt`, then step `dt`) plus jump epochs.
#[pyfunction]
#[pyo3(signature = (model, boundaries, horizons, n_paths, seed, dt = 0.25, refine = 10, ratio = 2.0, threads = None))]
#[allow(clippy::too_many_arguments)]
fn survival<'py>(
    py: Python<'py>,
    model: PyRef<'_, LevyModel>,
    boundaries: Vec<PyRef<'_, Boundary>>,
    horizons: Vec<f64>,
    n_paths: u64,
    seed: u64,
    dt: f64,
    refine: u32,
    ratio: f64,
    threads: Option<usize>,
) -> PyResult<Vec<Vec<Bound<'py, PyDict>>>> {
    let bs: Vec<CoreBoundary> = boundaries.iter().map(|b| b.inner).collect();
    let m = model.inner.clone();
    let est = py
        .detach(move || {
            let spec = process_for_model(&m)?;
            let run = SurvivalRun {
                threads,
                ..SurvivalRun::new(horizons, n_paths, GridPolicy::Geometric { dt, refine, ratio }, seed)
            };
            run.estimates(&spec, &bs)
        })
        .map_err(py_err)?;
    est.iter().map(|row| row.iter().map(|e| estimate_dict(py, e)).collect()).collect()
}

/// Weighted log-log fit of survivor counts; returns `rho_hat`, `stderr`, `r2`.
#[pyfunction]
fn fit_exponent<'py>(
    py: Python<'py>,
    horizons: Vec<f64>,
    survivors: Vec<u64>,
    n_paths: u64,
) -> PyResult<Bound<'py, PyDict>> {
    if horizons.len() != survivors.len() {
        return Err(PyValueError::new_err("horizons and survivors differ in length"));
    }
    let est: Vec<SurvivalEstimate> =
        horizons.iter().zip(&survivors).map(|(&t, &k)| SurvivalEstimate::from_counts(t, k, n_paths, 0)).collect();
    let f = fit_core(&est).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("rho_hat", f.rho_hat)?;
    d.set_item("stderr", f.stderr)?;
    d.set_item("r2", f.r2)?;
    d.set_item("intercept", f.intercept)?;
    d.set_item("dropped", f.dropped)?;
    Ok(d)
}

/// `κ(a, b)` for a constant positivity profile `ρ`.
#[pyfunction]
#[pyo3(signature = (rho, a, b = 0.0))]
fn kappa(rho: f64, a: f64, b: f64) -> PyResult<f64> {
    kappa_core(&PositivityProfile::Constant { rho }, a, b).map_err(py_err)
}

/// `δ(T) = min(1/ln ln T, 1/2)`.
#[pyfunction]
fn delta(t: f64) -> PyResult<f64> {
    delta_core(t).map_err(py_err)
}

/// Bound on `E exp(−λ S_T(1))` for the one-sided model `ν(dy) = y^{-α-1} dy`
/// on `side` (`"negative"` or `"positive"`); returns `(value, warning)`.
#[pyfunction]
#[pyo3(signature = (alpha, t, lam, side = "negative"))]
fn laplace_bound(alpha: f64, t: f64, lam: f64, side: &str) -> PyResult<(f64, Option<String>)> {
    let (dside, tside) = match side {
        "negative" => (DecompositionSide::NegativeJumps, Side::Left),
        "positive" => (DecompositionSide::PositiveJumps, Side::Right),
        _ => return Err(PyValueError::new_err(format!("side must be negative or positive, got {side:?}"))),
    };
    let tail = RegVaryingTail::new(alpha, SlowlyVarying::ONE, tside).map_err(py_err)?;
    let model = match tside {
        Side::Left => CoreModel::from_tails(0.0, 0.0, Some(tail), None),
        Side::Right => CoreModel::from_tails(0.0, 0.0, None, Some(tail)),
    };
    let dec = build_decomposition(&model, t, dside).map_err(py_err)?;
    let b = laplace_core(&dec, lam).map_err(py_err)?;
    Ok((b.value, b.warning))
}

/// `∫₁^∞ |c t^γ| t^{-3/2} dt`; returns `(classification, value)`.
#[pyfunction]
#[pyo3(signature = (gamma, coeff = 1.0))]
fn integral_test(gamma: f64, coeff: f64) -> PyResult<(String, f64)> {
    let r = brownian_integral_test(&TestFunction::Power { coeff, gamma }).map_err(py_err)?;
    let class = match r.classification {
        Classification::Convergent => "convergent",
        Classification::Divergent => "divergent",
        Classification::Unclassified => "unclassified",
    };
    Ok((class.to_string(), r.value))
}

/// Runs an experiment configuration given as text. Returns a dict with the
/// `csv`, `manifest` and `plot` (or `None`) file contents; raises
/// `ValueError` listing every field error.
#[pyfunction]
#[pyo3(signature = (text, seed = None, threads = None))]
fn run_config<'py>(
    py: Python<'py>,
    text: String,
    seed: Option<u64>,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let out = py.detach(move || cli::execute_text(&text, Overrides { seed, threads })).map_err(|rec| {
        let msgs: Vec<String> = rec.errors.iter().map(|e| format!("{}: {}", e.field, e.message)).collect();
        PyValueError::new_err(format!("{} error (exit {}): {}", rec.category, rec.exit_code, msgs.join("; ")))
    })?;
    let d = PyDict::new(py);
    d.set_item("csv", out.csv)?;
    d.set_item("manifest", out.manifest)?;
    d.set_item("plot", out.plot)?;
    d.set_item("summary", out.summary)?;
    Ok(d)
}

#[pymodule]
fn levy_passage(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<StableParams>()?;
    m.add_class::<LevyModel>()?;
    m.add_class::<Boundary>()?;
    m.add_function(wrap_pyfunction!(survival, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_bound, m)?)?;
    m.add_function(wrap_pyfunction!(integral_test, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
