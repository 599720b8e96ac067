//! Python bindings for the exact stabilizer-rank workbench.
//!
//! The module mirrors the main library types and operations with thin
//! wrappers; larger results (certificates, reports) cross the boundary as
//! JSON strings so Python callers can `json.loads` them directly.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use stabrank_core::fourier::{magic_correlation_bound, quadratic_scan, root_order, PhaseTable};
use stabrank_core::rank::{
    exact_rank2, frank_exact, magic_rank_pipeline, stab_rank_exact, verify_certificate,
    Decomposition, RankCertificate, SearchOutcome,
};
use stabrank_core::stab::{expected_count, magic_state, Catalog};
use stabrank_core::subspace::pigeonhole_subspace;
use stabrank_core::suites;
use stabrank_core::{FpVector, StateVector};

fn to_py_err(err: stabrank_core::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn json_err(err: serde_json::Error) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// A value in the p-power torsion of R/Z: `numerator / p^(depth+1) mod 1`.
#[pyclass(name = "TorusValue", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTorusValue {
    inner: stabrank_core::TorusValue,
}

#[pymethods]
impl PyTorusValue {
    #[new]
    fn new(p: u64, numerator: u64, depth: u32) -> PyResult<Self> {
        Ok(Self {
            inner: stabrank_core::TorusValue::new(p, numerator, depth).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn numerator(&self) -> u64 {
        self.inner.numerator()
    }

    #[getter]
    fn depth(&self) -> u32 {
        self.inner.depth()
    }

    #[getter]
    fn denominator(&self) -> u64 {
        self.inner.denominator()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn add(&self, other: &PyTorusValue) -> PyResult<Self> {
        Ok(Self {
            inner: stabrank_core::torus::torus_add(self.inner, other.inner).map_err(to_py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("TorusValue({})", self.inner)
    }

    fn __eq__(&self, other: &PyTorusValue) -> bool {
        self.inner == other.inner
    }
}

/// A nonclassical polynomial in its unique global coefficient form.
#[pyclass(name = "NonclassicalPoly", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPoly {
    inner: stabrank_core::NonclassicalPoly,
}

#[pymethods]
impl PyPoly {
    /// Parse the canonical text record `p n shift_num shift_depth ; ...`.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: stabrank_core::NonclassicalPoly::from_text(text).map_err(to_py_err)?,
        })
    }

    /// The magic phase polynomial for `(p, n)`.
    #[staticmethod]
    #[pyo3(signature = (p, n, cubic=None))]
    fn magic_phase(p: u64, n: usize, cubic: Option<(u64, u64, u64)>) -> PyResult<Self> {
        Ok(Self {
            inner: stabrank_core::NonclassicalPoly::magic_phase(p, n, cubic).map_err(to_py_err)?,
        })
    }

    /// `x -> (|x_1| + ... + |x_n|) / p^k`.
    #[staticmethod]
    fn lift_sum(p: u64, n: usize, k: u32) -> PyResult<Self> {
        Ok(Self {
            inner: stabrank_core::NonclassicalPoly::lift_sum(p, n, k).map_err(to_py_err)?,
        })
    }

    fn evaluate(&self, x: Vec<u64>) -> PyResult<PyTorusValue> {
        let point = FpVector::new(self.inner.modulus(), x).map_err(to_py_err)?;
        Ok(PyTorusValue {
            inner: self.inner.evaluate(&point).map_err(to_py_err)?,
        })
    }

    /// Degree via the exhaustive derivative scan, cross-checked against the
    /// representation.
    fn degree(&self) -> PyResult<usize> {
        self.inner.degree_checked().map_err(to_py_err)
    }

    #[getter]
    fn depth(&self) -> u32 {
        self.inner.depth()
    }

    fn is_classical(&self) -> bool {
        self.inner.is_classical()
    }

    fn text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!("NonclassicalPoly('{}')", self.inner.to_text())
    }
}

/// An affine subspace of F_p^n in canonical (RREF basis + reduced offset)
/// form.
#[pyclass(name = "AffineSubspace", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySubspace {
    inner: stabrank_core::AffineSubspace,
}

#[pymethods]
impl PySubspace {
    /// Parse the text form `p n dim ; basis rows ; offset`.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: stabrank_core::AffineSubspace::from_text(text).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }

    fn contains(&self, x: Vec<u64>) -> PyResult<bool> {
        let point = FpVector::new(self.inner.modulus(), x).map_err(to_py_err)?;
        Ok(self.inner.contains(&point))
    }

    fn text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!("AffineSubspace('{}')", self.inner.to_text())
    }
}

/// Stabilizer-state count by exhaustive enumeration; returns
/// `(count, [(subspace_text, form_text), ...])` and checks the closed-form
/// count `p^n * prod(p^k + 1)`.
#[pyfunction]
fn enumerate_stabilizers(p: u64, n: usize) -> PyResult<(usize, Vec<(String, String)>)> {
    let catalog = stabrank_core::stab::enumerate_stabilizers(p, n).map_err(to_py_err)?;
    let states = catalog
        .entries()
        .iter()
        .map(|e| (e.state.subspace().to_text(), e.state.form().to_text()))
        .collect();
    Ok((catalog.len(), states))
}

/// The closed-form stabilizer-state count.
#[pyfunction]
fn stabilizer_count_formula(p: u64, n: usize) -> u64 {
    expected_count(p, n)
}

/// Magic-state amplitudes as exact cyclotomic literals plus the root order.
#[pyfunction]
#[pyo3(signature = (p, n, cubic=None))]
fn magic_amplitudes(
    p: u64,
    n: usize,
    cubic: Option<(u64, u64, u64)>,
) -> PyResult<(u64, Vec<String>)> {
    let state = magic_state(p, n, cubic).map_err(to_py_err)?;
    Ok((
        state.root_order(),
        state
            .amplitudes()
            .iter()
            .map(stabrank_core::CycloNumber::to_text)
            .collect(),
    ))
}

/// Exact stabilizer rank of the `magic` or `plus` state; returns
/// `(rank_or_None, certificate_json)`.
#[pyfunction]
#[pyo3(signature = (p, n, state="magic", rmax=4))]
fn stab_rank(p: u64, n: usize, state: &str, rmax: usize) -> PyResult<(Option<usize>, String)> {
    let target = match state {
        "magic" => magic_state(p, n, None).map_err(to_py_err)?,
        "plus" => StateVector::plus_state(p, n).map_err(to_py_err)?,
        other => return Err(PyValueError::new_err(format!("unknown state '{other}'"))),
    };
    let catalog = Catalog::load_or_build(p, n, None).map_err(to_py_err)?;
    match stab_rank_exact(&target, &catalog, rmax).map_err(to_py_err)? {
        SearchOutcome::Found { rank, certificate } => Ok((
            Some(rank),
            serde_json::to_string(&certificate).map_err(json_err)?,
        )),
        SearchOutcome::Exhausted {
            r_max,
            subsets_checked,
        } => Ok((
            None,
            format!("{{\"exhausted_at_rmax\":{r_max},\"subsets_checked\":{subsets_checked}}}"),
        )),
    }
}

/// Exact 2-rank of a degree-<=2 polynomial; returns `(rank, certificate_json)`.
#[pyfunction]
fn rank2(poly: &PyPoly) -> PyResult<(usize, String)> {
    let (rank, cert) = exact_rank2(&poly.inner).map_err(to_py_err)?;
    Ok((rank, serde_json::to_string(&cert).map_err(json_err)?))
}

/// Exact degree-d Fourier rank of `e(P)`; returns `(rank_or_None, certificate_json)`.
#[pyfunction]
#[pyo3(signature = (poly, d=3, rmax=8))]
fn frank(poly: &PyPoly, d: usize, rmax: usize) -> PyResult<(Option<usize>, String)> {
    let table =
        PhaseTable::from_poly(&poly.inner, root_order(poly.inner.modulus())).map_err(to_py_err)?;
    match frank_exact(&table, d, rmax).map_err(to_py_err)? {
        SearchOutcome::Found { rank, certificate } => Ok((
            Some(rank),
            serde_json::to_string(&certificate).map_err(json_err)?,
        )),
        SearchOutcome::Exhausted {
            r_max,
            subsets_checked,
        } => Ok((
            None,
            format!("{{\"exhausted_at_rmax\":{r_max},\"subsets_checked\":{subsets_checked}}}"),
        )),
    }
}

/// Exhaustive quadratic-correlation scan of a polynomial phase function
/// (JSON report).
#[pyfunction]
#[pyo3(signature = (poly, bits=128))]
fn scan_quadratics(poly: &PyPoly, bits: u32) -> PyResult<String> {
    let report = quadratic_scan(&poly.inner, bits).map_err(to_py_err)?;
    serde_json::to_string(&report).map_err(json_err)
}

/// The magic-phase correlation bound report for `(p, n)` (JSON).
#[pyfunction]
#[pyo3(signature = (p, n, bits=128))]
fn correlation_bound(p: u64, n: usize, bits: u32) -> PyResult<String> {
    let report = magic_correlation_bound(p, n, bits).map_err(to_py_err)?;
    serde_json::to_string(&report).map_err(json_err)
}

/// Constant-membership-pattern subspace for a list of subspace texts;
/// returns `(subspace_text, member_indices, dim)`.
#[pyfunction]
fn pigeonhole(subspaces: Vec<String>) -> PyResult<(String, Vec<usize>, usize)> {
    let parsed: Vec<stabrank_core::AffineSubspace> = subspaces
        .iter()
        .map(|s| stabrank_core::AffineSubspace::from_text(s))
        .collect::<stabrank_core::Result<_>>()
        .map_err(to_py_err)?;
    let out = pigeonhole_subspace(&parsed).map_err(to_py_err)?;
    Ok((out.subspace.to_text(), out.members, out.subspace.dim()))
}

/// Run the full magic-state rank pipeline at `(p, n)` on the searched
/// witness (JSON report).
#[pyfunction]
#[pyo3(signature = (p, n, rmax=4, bits=128))]
fn magic_pipeline(p: u64, n: usize, rmax: usize, bits: u32) -> PyResult<String> {
    let target = magic_state(p, n, None).map_err(to_py_err)?;
    let catalog = Catalog::load_or_build(p, n, None).map_err(to_py_err)?;
    let outcome = stab_rank_exact(&target, &catalog, rmax).map_err(to_py_err)?;
    let cert = outcome
        .certificate()
        .ok_or_else(|| PyValueError::new_err("no decomposition within rmax"))?;
    let decomp = Decomposition::from_certificate(cert).map_err(to_py_err)?;
    let report = magic_rank_pipeline(&decomp, bits).map_err(to_py_err)?;
    serde_json::to_string(&report).map_err(json_err)
}

/// Re-verify a certificate JSON string; returns `(ok, detail)`.
#[pyfunction]
#[pyo3(signature = (certificate_json, bits=128))]
fn check_certificate(certificate_json: &str, bits: u32) -> PyResult<(bool, String)> {
    let cert: RankCertificate = serde_json::from_str(certificate_json).map_err(json_err)?;
    let outcome = verify_certificate(&cert, bits).map_err(to_py_err)?;
    Ok((outcome.ok, outcome.detail))
}

/// Run a named verification suite; returns the JSON list of suite reports.
#[pyfunction]
#[pyo3(signature = (name, seed=7, bits=128))]
fn verify_suite(name: &str, seed: u64, bits: u32) -> PyResult<String> {
    let reports = suites::run_named(name, seed, bits, None).map_err(to_py_err)?;
    serde_json::to_string(&reports).map_err(json_err)
}

#[pymodule]
fn stabrank_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTorusValue>()?;
    m.add_class::<PyPoly>()?;
    m.add_class::<PySubspace>()?;
    m.add_function(wrap_pyfunction!(enumerate_stabilizers, m)?)?;
    m.add_function(wrap_pyfunction!(stabilizer_count_formula, m)?)?;
    m.add_function(wrap_pyfunction!(magic_amplitudes, m)?)?;
    m.add_function(wrap_pyfunction!(stab_rank, m)?)?;
    m.add_function(wrap_pyfunction!(rank2, m)?)?;
    m.add_function(wrap_pyfunction!(frank, m)?)?;
    m.add_function(wrap_pyfunction!(scan_quadratics, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_bound, m)?)?;
    m.add_function(wrap_pyfunction!(pigeonhole, m)?)?;
    m.add_function(wrap_pyfunction!(magic_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(check_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    Ok(())
}
