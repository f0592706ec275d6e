//! Python bindings: specs, grids, pointwise forms, classification, residual
//! suites and reconstruction.

use frontal_core::catalog;
use frontal_core::classify::{classify_grid, relative_curvatures, DEFAULT_TOL_CLASS};
use frontal_core::compat::{
    classical_compatibility_residuals, ideal_membership_report, relative_residuals, ResidualReport,
    DEFAULT_REFINEMENT_LEVELS,
};
use frontal_core::frontal::{evaluate as evaluate_bundle, sample_jets, FrontalSpec, DEFAULT_TOL_SING};
use frontal_core::io;
use frontal_core::linalg::{Mat2, Vec3};
use frontal_core::reconstruct::{derive_data, reconstruct, roundtrip as run_roundtrip, FrameField};
use frontal_core::GridSpec;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::collections::BTreeMap;

create_exception!(frontals, FrontalsError, PyException);

fn err(e: impl ToString) -> PyErr {
    FrontalsError::new_err(e.to_string())
}

fn mat2(m: &Mat2) -> [[f64; 2]; 2] {
    m.m
}

fn points(v: &[Vec3]) -> Vec<[f64; 3]> {
    v.iter().map(|p| p.0).collect()
}

/// A frontal given by `x` and a tangent moving base over a rectangle.
#[pyclass(name = "Spec", module = "frontals", frozen)]
#[derive(Clone)]
pub struct PySpec {
    inner: FrontalSpec,
}

#[pymethods]
impl PySpec {
    /// Parses a `key = value` spec document.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        io::parse_spec(text).map(|inner| PySpec { inner }).map_err(err)
    }

    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        catalog::lookup(name).map(|inner| PySpec { inner }).ok_or_else(|| err(format!("no catalog entry '{name}'")))
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn expect_violation(&self) -> bool {
        self.inner.expect_violation
    }

    /// `(u0, u1, v0, v1)`.
    #[getter]
    fn domain(&self) -> (f64, f64, f64, f64) {
        let d = self.inner.domain;
        (d.u0, d.u1, d.v0, d.v1)
    }

    fn to_text(&self) -> String {
        io::format_spec(&self.inner)
    }

    /// The grid used when none is given: the one fixed by `grid.nu`/`grid.nv`, else `n × n`.
    #[pyo3(signature = (n = 101))]
    fn default_grid(&self, n: usize) -> PyGrid {
        PyGrid { inner: self.inner.default_grid(n) }
    }

    fn __repr__(&self) -> String {
        format!("Spec({:?})", self.inner.name)
    }
}

#[pyclass(name = "Grid", module = "frontals", frozen)]
#[derive(Clone)]
pub struct PyGrid {
    inner: GridSpec,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(u0: f64, u1: f64, nu: usize, v0: f64, v1: f64, nv: usize) -> PyResult<Self> {
        GridSpec::new(u0, u1, nu, v0, v1, nv).map(|inner| PyGrid { inner }).map_err(|e| err(e.0))
    }

    /// `u0:u1:nu,v0:v1:nv`.
    #[staticmethod]
    fn parse(s: &str) -> PyResult<Self> {
        io::parse_grid(s).map(|inner| PyGrid { inner }).map_err(err)
    }

    #[staticmethod]
    fn with_spacing(u0: f64, u1: f64, v0: f64, v1: f64, h: f64) -> PyResult<Self> {
        GridSpec::with_spacing(u0, u1, v0, v1, h).map(|inner| PyGrid { inner }).map_err(|e| err(e.0))
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.nu, self.inner.nv)
    }

    /// Node coordinates in grid order (`u` fastest).
    fn points(&self) -> Vec<(f64, f64)> {
        self.inner.points().collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Grid({:?})", io::format_grid(&self.inner))
    }
}

fn grid_or_default(spec: &PySpec, grid: Option<&PyGrid>) -> GridSpec {
    grid.map(|g| g.inner).unwrap_or_else(|| spec.inner.default_grid(101))
}

fn catalog_names() -> Vec<&'static str> {
    catalog::names()
}

/// Matrix fields at one point.
#[pyfunction]
fn evaluate<'py>(py: Python<'py>, spec: &PySpec, u: f64, v: f64) -> PyResult<Bound<'py, PyDict>> {
    let b = evaluate_bundle(&spec.inner, u, v, DEFAULT_TOL_SING).map_err(err)?;
    let (k, h) = relative_curvatures(&b);
    let d = PyDict::new(py);
    d.set_item("x", b.x.0)?;
    d.set_item("n", b.n.0)?;
    d.set_item("lambda", mat2(&b.lambda))?;
    d.set_item("lambda_det", b.lambda_det)?;
    d.set_item("i_omega", mat2(&b.i_omega))?;
    d.set_item("ii_omega", mat2(&b.ii_omega))?;
    d.set_item("mu", mat2(&b.mu))?;
    d.set_item("theta1", mat2(&b.theta1))?;
    d.set_item("theta2", mat2(&b.theta2))?;
    d.set_item("k_rel", k)?;
    d.set_item("h_rel", h)?;
    Ok(d)
}

/// Per-node verdicts with `λ_Ω`, `K_Ω`, `H_Ω`.
#[pyfunction]
#[pyo3(signature = (spec, grid = None, tol = DEFAULT_TOL_CLASS))]
fn classify<'py>(py: Python<'py>, spec: &PySpec, grid: Option<&PyGrid>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let g = grid_or_default(spec, grid);
    let gc = classify_grid(&spec.inner, &g, DEFAULT_TOL_SING, tol);
    let rows = gc.nodes.into_iter().collect::<Result<Vec<_>, _>>().map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("points", rows.iter().map(|r| r.point).collect::<Vec<_>>())?;
    d.set_item("lambda_det", rows.iter().map(|r| r.lambda_det).collect::<Vec<_>>())?;
    d.set_item("k_rel", rows.iter().map(|r| r.k_rel).collect::<Vec<_>>())?;
    d.set_item("h_rel", rows.iter().map(|r| r.h_rel).collect::<Vec<_>>())?;
    d.set_item("verdicts", rows.iter().map(|r| r.verdict.as_str()).collect::<Vec<_>>())?;
    Ok(d)
}

fn report_map(reports: &[ResidualReport]) -> BTreeMap<String, (f64, (f64, f64))> {
    reports.iter().map(|r| (r.id.as_str().to_string(), (r.max_abs_residual, r.argmax))).collect()
}

/// Largest residual and where it occurs, per identity: the Ω-relative
/// suites plus the classical equations on regular nodes.
#[pyfunction]
#[pyo3(signature = (spec, grid = None))]
fn residuals(spec: &PySpec, grid: Option<&PyGrid>) -> PyResult<BTreeMap<String, (f64, (f64, f64))>> {
    let g = grid_or_default(spec, grid);
    let mut out = report_map(&relative_residuals(&spec.inner, &g).map_err(err)?);
    out.extend(report_map(&classical_compatibility_residuals(&spec.inner, &g).map_err(err)?));
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (spec, grid = None, levels = DEFAULT_REFINEMENT_LEVELS))]
fn ideal_membership<'py>(
    py: Python<'py>,
    spec: &PySpec,
    grid: Option<&PyGrid>,
    levels: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let g = grid_or_default(spec, grid);
    let m = ideal_membership_report(&spec.inner, &g, levels);
    let d = PyDict::new(py);
    d.set_item("singular_nodes", m.singular_nodes)?;
    d.set_item("n_max_on_sigma", m.n_max_on_sigma)?;
    d.set_item("tau_oscillation", m.levels.iter().map(|l| l.tau_osc).collect::<Vec<_>>())?;
    d.set_item("theta_defect", m.theta_defect)?;
    match &m.violation {
        None => {
            d.set_item("violation", py.None())?;
            d.set_item("at", py.None())?;
        }
        Some((failure, at, detail)) => {
            d.set_item("violation", format!("{failure}; {detail}"))?;
            d.set_item("at", *at)?;
        }
    }
    Ok(d)
}

fn frame_dict<'py>(py: Python<'py>, f: &FrameField) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("frobenius_residual", f.frobenius_residual)?;
    d.set_item("gram_defect", f.gram_defect)?;
    d.set_item("normal_defect", f.normal_defect)?;
    d.set_item("min_det", f.min_det)?;
    d.set_item("mixed_partial_residual", f.mixed_partial_residual)?;
    d.set_item("points", points(&f.x))?;
    Ok(d)
}

/// Derives data on a grid of spacing `h`, reconstructs and aligns with the
/// original.
#[pyfunction]
#[pyo3(signature = (spec, h = 0.01))]
fn roundtrip<'py>(py: Python<'py>, spec: &PySpec, h: f64) -> PyResult<Bound<'py, PyDict>> {
    let dm = spec.inner.domain;
    let g = GridSpec::with_spacing(dm.u0, dm.u1, dm.v0, dm.v1, h).map_err(|e| err(e.0))?;
    let rt = py.allow_threads(|| run_roundtrip(&spec.inner, &g)).map_err(err)?;
    let d = frame_dict(py, &rt.frame)?;
    let a = &rt.alignment;
    d.set_item("rms", a.rms_error)?;
    d.set_item("max_error", a.max_error)?;
    d.set_item("rotation", a.rotation.m)?;
    d.set_item("rotation_det", a.rotation.det())?;
    d.set_item("translation", a.translation.0)?;
    d.set_item("original", points(&rt.original))?;
    Ok(d)
}

/// Writes reconstruction data for `spec` to a directory.
#[pyfunction]
#[pyo3(signature = (spec, path, grid = None))]
fn export_data(spec: &PySpec, path: std::path::PathBuf, grid: Option<&PyGrid>) -> PyResult<()> {
    let g = grid_or_default(spec, grid);
    let data = derive_data(&spec.inner, &g).map_err(err)?;
    io::write_data_dir(&path, &data).map_err(err)
}

/// Reconstructs a surface from a data directory.
#[pyfunction]
fn reconstruct_dir<'py>(py: Python<'py>, path: std::path::PathBuf) -> PyResult<Bound<'py, PyDict>> {
    let data = io::read_data_dir(&path).map_err(err)?;
    let f = py.allow_threads(|| reconstruct(&data, None)).map_err(err)?;
    frame_dict(py, &f)
}

/// Sampled surface points in grid order.
#[pyfunction]
#[pyo3(signature = (spec, grid = None))]
fn sample(spec: &PySpec, grid: Option<&PyGrid>) -> PyResult<Vec<[f64; 3]>> {
    let g = grid_or_default(spec, grid);
    sample_jets(&spec.inner, &g).into_iter().map(|j| j.map(|j| j.x.map(|c| c.value).0).map_err(err)).collect()
}

#[pymodule]
fn frontals(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add_class::<PyGrid>()?;
    m.add("FrontalsError", m.py().get_type::<FrontalsError>())?;
    m.add("CATALOG", catalog_names())?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(residuals, m)?)?;
    m.add_function(wrap_pyfunction!(ideal_membership, m)?)?;
    m.add_function(wrap_pyfunction!(roundtrip, m)?)?;
    m.add_function(wrap_pyfunction!(export_data, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_dir, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    Ok(())
}
