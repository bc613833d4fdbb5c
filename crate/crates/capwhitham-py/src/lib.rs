//! Python bindings for the capillary-gravity Whitham proof library.
//!
//! Exposes intervals, the Newton solver, the existence proof with its
//! certificate, the radii-polynomial check and the stability analysis.

use std::path::PathBuf;

use capwhitham::approx::{solve as solve_rs, SolveConfig};
use capwhitham::certify::{self, ExistenceConfig};
use capwhitham::error::Error;
use capwhitham::rigor;
use capwhitham::spectral::{self, SpectralSetup, StabilityConfig};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(capwhitham_py, ProofError, PyException, "A certification step failed.");

fn to_py(e: Error) -> PyErr {
    ProofError::new_err(e.to_string())
}

/// Closed interval with outward-rounded arithmetic.
#[pyclass(frozen)]
#[derive(Clone, Copy)]
struct Interval {
    inner: rigor::Interval,
}

#[pymethods]
impl Interval {
    #[new]
    #[pyo3(signature = (lo, hi = None))]
    fn new(lo: f64, hi: Option<f64>) -> PyResult<Self> {
        let inner = rigor::Interval::try_new(lo, hi.unwrap_or(lo)).map_err(to_py)?;
        Ok(Interval { inner })
    }

    /// Lower endpoint.
    #[getter]
    fn lo(&self) -> f64 {
        self.inner.lo()
    }

    /// Upper endpoint.
    #[getter]
    fn hi(&self) -> f64 {
        self.inner.hi()
    }

    /// Whether `x` lies in the interval.
    fn contains(&self, x: f64) -> bool {
        self.inner.contains(x)
    }

    fn __add__(&self, o: &Interval) -> Interval {
        Interval { inner: self.inner + o.inner }
    }

    fn __sub__(&self, o: &Interval) -> Interval {
        Interval { inner: self.inner - o.inner }
    }

    fn __mul__(&self, o: &Interval) -> Interval {
        Interval { inner: self.inner * o.inner }
    }

    fn __truediv__(&self, o: &Interval) -> PyResult<Interval> {
        Ok(Interval { inner: self.inner.checked_div(&o.inner).map_err(to_py)? })
    }

    /// Enclosure of the exponential.
    fn exp(&self) -> Interval {
        Interval { inner: self.inner.exp() }
    }

    /// Enclosure of the square root.
    fn sqrt(&self) -> PyResult<Interval> {
        Ok(Interval { inner: self.inner.sqrt().map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        format!("Interval({:e}, {:e})", self.inner.lo(), self.inner.hi())
    }
}

fn wrap(i: rigor::Interval) -> Interval {
    Interval { inner: i }
}

/// Floating-point approximate solitary wave.
#[pyclass(frozen)]
struct Solution {
    #[pyo3(get)]
    t: f64,
    #[pyo3(get)]
    c: f64,
    #[pyo3(get)]
    d: f64,
    /// Cosine coefficients `u_0, …, u_N`.
    #[pyo3(get)]
    coeffs: Vec<f64>,
    #[pyo3(get)]
    residual: f64,
    #[pyo3(get)]
    iterations: usize,
}

/// Newton solve for the cosine coefficients on `(-d, d)` with `N` modes.
#[pyfunction]
fn solve(t: f64, c: f64, d: f64, n: usize) -> PyResult<Solution> {
    let s = solve_rs(&SolveConfig::new(t, c, d, n)).map_err(to_py)?;
    Ok(Solution { t: s.t, c: s.c, d: s.d, coeffs: s.coeffs, residual: s.residual, iterations: s.iterations })
}

/// A completed existence proof.
#[pyclass(frozen)]
struct ExistenceProof {
    inner: certify::ExistenceProof,
}

#[pymethods]
impl ExistenceProof {
    /// Residual bound `Y0`.
    #[getter]
    fn y0(&self) -> Interval {
        wrap(self.inner.bounds.y0)
    }

    /// Defect bound `Z1`.
    #[getter]
    fn z1(&self) -> Interval {
        wrap(self.inner.bounds.z1)
    }

    /// Lipschitz bound `Z2`.
    #[getter]
    fn z2(&self) -> Interval {
        wrap(self.inner.bounds.z2)
    }

    /// Certified radius.
    #[getter]
    fn r(&self) -> f64 {
        self.inner.radii.r
    }

    /// Admissible radius range `(r_min, r_max)`.
    #[getter]
    fn r_range(&self) -> (f64, f64) {
        (self.inner.radii.r_min, self.inner.radii.r_max)
    }

    /// Regularity margin `ε` for `T = 0`, `None` otherwise.
    #[getter]
    fn epsilon(&self) -> Option<f64> {
        self.inner.regularity.map(|r| r.epsilon)
    }

    /// Writes the JSON certificate.
    fn emit(&self, path: PathBuf) -> PyResult<()> {
        certify::emit(&self.inner, &path).map(|_| ()).map_err(to_py)
    }

    /// Runs the stability analysis on the proven solution.
    fn stability(&self) -> PyResult<StabilityVerdict> {
        let s = SpectralSetup::from_proof(&self.inner).map_err(to_py)?;
        let v = spectral::prove_stability(&s, &StabilityConfig::default()).map_err(to_py)?;
        Ok(StabilityVerdict { inner: v })
    }
}

/// Proves existence near the given coefficients.
#[pyfunction]
#[pyo3(signature = (t, c, d, coeffs, a, safety = 0.99, strip_grid = 64))]
fn prove_existence(t: f64, c: f64, d: f64, coeffs: Vec<f64>, a: f64, safety: f64, strip_grid: usize) -> PyResult<ExistenceProof> {
    let n = coeffs.len().saturating_sub(1);
    let cfg = ExistenceConfig { t, c, d, n, a, sigma0: None, safety, strip_grid };
    let inner = certify::prove_existence(&cfg, &coeffs).map_err(to_py)?;
    Ok(ExistenceProof { inner })
}

/// Value of the radii polynomial at `r`; raises when it is not negative.
#[pyfunction]
fn check_radii(y0: f64, z1: f64, z2: f64, r: f64) -> PyResult<Interval> {
    let p = rigor::Interval::point;
    certify::check_radii(p(y0), p(z1), p(z2), r).map(wrap).map_err(to_py)
}

/// Re-checks a certificate file and returns its radius.
#[pyfunction]
fn recheck(path: PathBuf) -> PyResult<f64> {
    certify::recheck(&path).map(|c| c.proof.radii.r).map_err(to_py)
}

/// Outcome of the stability analysis.
#[pyclass(frozen)]
struct StabilityVerdict {
    inner: spectral::StabilityVerdict,
}

#[pymethods]
impl StabilityVerdict {
    #[getter]
    fn p1(&self) -> bool {
        self.inner.p1
    }

    #[getter]
    fn p2(&self) -> bool {
        self.inner.p2
    }

    #[getter]
    fn p3(&self) -> bool {
        self.inner.p3
    }

    #[getter]
    fn stable(&self) -> bool {
        self.inner.stable
    }

    /// Certified negative eigenvalues as `(λ0, r, R)` triples.
    #[getter]
    fn negative(&self) -> Vec<(f64, f64, f64)> {
        self.inner.negative.iter().map(|e| (e.lambda0, e.r, e.big_r)).collect()
    }

    /// Accepted sweep shifts as `(λ*, C_lo)` pairs.
    #[getter]
    fn sweep(&self) -> Vec<(f64, f64)> {
        self.inner.sweep.as_ref().map_or_else(Vec::new, |l| l.entries.iter().map(|e| (e.shift, e.c_lo)).collect())
    }
}

#[pymodule]
fn capwhitham_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ProofError", m.py().get_type::<ProofError>())?;
    m.add_class::<Interval>()?;
    m.add_class::<Solution>()?;
    m.add_class::<ExistenceProof>()?;
    m.add_class::<StabilityVerdict>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(prove_existence, m)?)?;
    m.add_function(wrap_pyfunction!(check_radii, m)?)?;
    m.add_function(wrap_pyfunction!(recheck, m)?)?;
    Ok(())
}
