//! Python bindings for the umeb23 toolkit.
//!
//! Structured data crosses the boundary as the same JSON documents the CLI
//! reads and writes; a `BasisPair` class wraps the core type for in-process
//! work. Build with `cargo build -p umeb23-py --release` and import the
//! produced cdylib as the module `umeb23_py` (see python/smoke_test.py).

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use umeb23::audit::run_audit;
use umeb23::construct::{self, sample_valid_params, FirstBasisSpec, ThetaParams};
use umeb23::linalg::{schmidt_profile as core_schmidt, StateVector};
use umeb23::scalar::{Backend, Scalar, DEFAULT_TOLERANCE};
use umeb23::verify::{verify_pair, verify_pair_both, GridSpec, VerifyOptions};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn options(tol: f64, grid: (usize, usize), grid_oracle: bool) -> VerifyOptions {
    VerifyOptions {
        tol,
        grid: GridSpec {
            nt: grid.0,
            nphi: grid.1,
        },
        grid_oracle,
        ..VerifyOptions::default()
    }
}

fn parse_params(params_json: &str) -> PyResult<ThetaParams> {
    serde_json::from_str(params_json).map_err(value_err)
}

fn resolve_backend(name: &str, params: &ThetaParams) -> PyResult<Backend> {
    match name {
        "exact" => Ok(Backend::Exact),
        "float" => Ok(Backend::Float),
        "auto" => Ok(params.preferred_backend()),
        other => Err(value_err(format!("unknown backend `{other}`"))),
    }
}

/// Toolkit version string.
#[pyfunction]
fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Parameters of a built-in example (1, 2, or 3) as a ThetaParams JSON
/// document.
#[pyfunction]
fn example_params(n: u8) -> PyResult<String> {
    let ex = umeb23::fixtures::example(n).map_err(value_err)?;
    Ok(serde_json::to_string_pretty(&ex.params).expect("serializable"))
}

/// First-basis completion name of a built-in example.
#[pyfunction]
fn example_first_basis(n: u8) -> PyResult<String> {
    let ex = umeb23::fixtures::example(n).map_err(value_err)?;
    Ok(ex.first_basis_kind.to_string())
}

/// Deterministic closure-valid parameter sets, as ThetaParams JSON strings.
/// With `exact_grid` the free angles stay on the pi/12 grid (exact backend);
/// otherwise they cover the whole family (float backend).
#[pyfunction]
#[pyo3(signature = (seed, count, exact_grid = true))]
fn sample_params(seed: u64, count: usize, exact_grid: bool) -> Vec<String> {
    sample_valid_params(seed, count, exact_grid)
        .iter()
        .map(|p| serde_json::to_string(p).expect("serializable"))
        .collect()
}

/// Builds a basis pair from ThetaParams JSON and returns the pair JSON.
#[pyfunction]
#[pyo3(signature = (params_json, first_basis = "default", backend = "auto", checked = true, tol = DEFAULT_TOLERANCE))]
fn build_pair_json(
    params_json: &str,
    first_basis: &str,
    backend: &str,
    checked: bool,
    tol: f64,
) -> PyResult<String> {
    let params = parse_params(params_json)?;
    let backend = resolve_backend(backend, &params)?;
    let spec = FirstBasisSpec::by_name(first_basis, backend).map_err(value_err)?;
    let pair = construct::build_pair(&params, &spec, backend, checked, tol).map_err(value_err)?;
    Ok(pair.to_json())
}

/// Verifies a basis-pair JSON document and returns the report JSON.
#[pyfunction]
#[pyo3(signature = (pair_json, tol = DEFAULT_TOLERANCE, grid = (181, 360), grid_oracle = true, backend = "auto"))]
fn verify_pair_json(
    pair_json: &str,
    tol: f64,
    grid: (usize, usize),
    grid_oracle: bool,
    backend: &str,
) -> PyResult<String> {
    let pair = construct::BasisPair::from_json(pair_json, tol).map_err(value_err)?;
    let opts = options(tol, grid, grid_oracle);
    let report = match backend {
        "auto" => verify_pair(&pair, &opts),
        "exact" if pair.backend == Backend::Exact => verify_pair(&pair, &opts),
        "exact" => Err(umeb23::Error::NotEmbeddable(
            "the document stores float amplitudes".into(),
        )),
        "float" => verify_pair(&pair.to_float(), &opts),
        "both" => verify_pair_both(&pair, &opts),
        other => return Err(value_err(format!("unknown backend `{other}`"))),
    }
    .map_err(value_err)?;
    Ok(report.to_json())
}

/// Rebuilds and adjudicates a built-in example; returns the audit JSON.
#[pyfunction]
#[pyo3(signature = (n, tol = DEFAULT_TOLERANCE, grid = (181, 360)))]
fn audit_example(n: u8, tol: f64, grid: (usize, usize)) -> PyResult<String> {
    let report = run_audit(n, &options(tol, grid, true)).map_err(value_err)?;
    Ok(report.to_json())
}

/// Schmidt coefficients (descending) and rank of a 6-amplitude state in the
/// row-major product ordering.
#[pyfunction]
#[pyo3(signature = (amplitudes, tol = DEFAULT_TOLERANCE))]
fn schmidt_profile(amplitudes: Vec<Complex64>, tol: f64) -> PyResult<((f64, f64), usize)> {
    let amps: Vec<Scalar> = amplitudes
        .into_iter()
        .map(|c| Scalar::Float { re: c.re, im: c.im })
        .collect();
    let state = StateVector::new(amps).map_err(value_err)?;
    let profile = core_schmidt(&state, tol);
    Ok((
        (profile.coefficients[0], profile.coefficients[1]),
        profile.rank,
    ))
}

/// A constructed or parsed basis pair held in process.
#[pyclass(name = "BasisPair")]
struct PyBasisPair {
    inner: construct::BasisPair,
}

#[pymethods]
impl PyBasisPair {
    /// Builds the pair from ThetaParams JSON.
    #[staticmethod]
    #[pyo3(signature = (params_json, first_basis = "default", backend = "auto", checked = true, tol = DEFAULT_TOLERANCE))]
    fn build(
        params_json: &str,
        first_basis: &str,
        backend: &str,
        checked: bool,
        tol: f64,
    ) -> PyResult<Self> {
        let params = parse_params(params_json)?;
        let backend = resolve_backend(backend, &params)?;
        let spec = FirstBasisSpec::by_name(first_basis, backend).map_err(value_err)?;
        let inner =
            construct::build_pair(&params, &spec, backend, checked, tol).map_err(value_err)?;
        Ok(PyBasisPair { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (text, tol = DEFAULT_TOLERANCE))]
    fn from_json(text: &str, tol: f64) -> PyResult<Self> {
        Ok(PyBasisPair {
            inner: construct::BasisPair::from_json(text, tol).map_err(value_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn backend(&self) -> &'static str {
        match self.inner.backend {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }

    /// Amplitudes of one member (`basis` is "first" or "second") as Python
    /// complex numbers.
    fn amplitudes(&self, basis: &str, member: usize) -> PyResult<Vec<Complex64>> {
        let states = match basis {
            "first" => &self.inner.first,
            "second" => &self.inner.second,
            other => return Err(value_err(format!("basis must be first/second, got {other}"))),
        };
        let state = states
            .get(member)
            .ok_or_else(|| value_err(format!("member {member} out of range")))?;
        Ok(state
            .amplitudes()
            .iter()
            .map(|a| {
                let (re, im) = a.to_complex();
                Complex64::new(re, im)
            })
            .collect())
    }

    /// Runs the full verification and returns the report JSON.
    #[pyo3(signature = (tol = DEFAULT_TOLERANCE, grid = (181, 360), grid_oracle = true))]
    fn verify(&self, tol: f64, grid: (usize, usize), grid_oracle: bool) -> PyResult<String> {
        let report =
            verify_pair(&self.inner, &options(tol, grid, grid_oracle)).map_err(value_err)?;
        Ok(report.to_json())
    }

    fn __repr__(&self) -> String {
        format!(
            "BasisPair(backend={}, provenance={})",
            self.backend(),
            self.inner.provenance.is_some()
        )
    }
}

#[pymodule]
fn umeb23_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(version, m)?)?;
    m.add_function(wrap_pyfunction!(example_params, m)?)?;
    m.add_function(wrap_pyfunction!(example_first_basis, m)?)?;
    m.add_function(wrap_pyfunction!(sample_params, m)?)?;
    m.add_function(wrap_pyfunction!(build_pair_json, m)?)?;
    m.add_function(wrap_pyfunction!(verify_pair_json, m)?)?;
    m.add_function(wrap_pyfunction!(audit_example, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_profile, m)?)?;
    m.add_class::<PyBasisPair>()?;
    Ok(())
}
