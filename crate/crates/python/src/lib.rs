//! Python bindings: measures, offset solving, splitting, separability,
//! box certificates, partitions, central spheres and scenarios.
//!
//! Reports are returned as plain dicts mirroring the CLI's JSON schema.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};

use hamsplit_core::auxiliary::{
    self, sample_central_sphere, solve_lambda, turning_number, ConvexSet,
};
use hamsplit_core::geom::{Hyperplane, Vector};
use hamsplit_core::measure::Measure as CoreMeasure;
use hamsplit_core::miranda::{check_faces, miranda_root, BoxRegion};
use hamsplit_core::partition;
use hamsplit_core::scenario;
use hamsplit_core::schema;
use hamsplit_core::separability::{self, PointSet, SignPattern};
use hamsplit_core::solver::{self, Problem, SolveConfig, SplitOutcome};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any()
            }
        }
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            dict.into_any()
        }
    })
}

fn serialize_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn vector(coords: Vec<f64>) -> Vector {
    Vector::new(coords)
}

fn unit_plane(normal: Vec<f64>, offset: f64) -> PyResult<Hyperplane> {
    Hyperplane::new(vector(normal), offset).map_err(err)
}

fn parse_container(spec: Option<(Vec<f64>, f64)>, m: &CoreMeasure) -> ConvexSet {
    match spec {
        Some((center, radius)) => ConvexSet::Ball { center: vector(center), radius },
        None => {
            let (c, r) = m.bounding_ball();
            ConvexSet::Ball { center: c, radius: r }
        }
    }
}

/// A continuous probability measure with evaluable half-space masses.
#[pyclass(name = "Measure", from_py_object)]
#[derive(Clone)]
struct PyMeasure {
    inner: CoreMeasure,
}

#[pymethods]
impl PyMeasure {
    #[staticmethod]
    fn uniform_ball(center: Vec<f64>, radius: f64) -> PyResult<Self> {
        Ok(PyMeasure { inner: CoreMeasure::uniform_ball(vector(center), radius).map_err(err)? })
    }

    #[staticmethod]
    fn uniform_polytope(vertices: Vec<Vec<f64>>) -> PyResult<Self> {
        let verts = vertices.into_iter().map(vector).collect();
        Ok(PyMeasure { inner: CoreMeasure::uniform_polytope(verts).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (center, radius, exponent = 2))]
    fn smooth_cap(center: Vec<f64>, radius: f64, exponent: u32) -> PyResult<Self> {
        Ok(PyMeasure {
            inner: CoreMeasure::smooth_cap(vector(center), radius, exponent).map_err(err)?,
        })
    }

    #[staticmethod]
    fn mixture(components: Vec<(f64, PyMeasure)>) -> PyResult<Self> {
        let comps = components.into_iter().map(|(w, m)| (w, m.inner)).collect();
        Ok(PyMeasure { inner: CoreMeasure::mixture(comps).map_err(err)? })
    }

    #[staticmethod]
    fn kernel_cloud(points: Vec<Vec<f64>>, bandwidth: f64) -> PyResult<Self> {
        let pts = points.into_iter().map(vector).collect();
        Ok(PyMeasure { inner: CoreMeasure::kernel_cloud(pts, bandwidth).map_err(err)? })
    }

    /// Restriction to one side of a hyperplane, renormalized (planar).
    fn conditional(&self, normal: Vec<f64>, offset: f64, side: i8) -> PyResult<Self> {
        let h = unit_plane(normal, offset)?;
        Ok(PyMeasure { inner: CoreMeasure::conditional(self.inner.clone(), h, side).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec: hamsplit_core::measure::MeasureSpec =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyMeasure { inner: CoreMeasure::from_spec(spec).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.spec()).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn is_analytic(&self) -> bool {
        self.inner.is_analytic()
    }

    fn bounding_ball(&self) -> (Vec<f64>, f64) {
        let (c, r) = self.inner.bounding_ball();
        (c.0, r)
    }

    /// Mass of `{x : <x, normal> >= offset}` and its error bound.
    fn mass_halfspace(&self, normal: Vec<f64>, offset: f64) -> PyResult<(f64, f64)> {
        let h = unit_plane(normal, offset)?;
        let mv = self.inner.mass_halfspace(&h).map_err(err)?;
        Ok((mv.value, mv.error_bound))
    }

    /// Fixed-seed Monte-Carlo mass with a 3-sigma error bound.
    fn mass_halfspace_mc(
        &self,
        normal: Vec<f64>,
        offset: f64,
        samples: usize,
        seed: u64,
    ) -> PyResult<(f64, f64)> {
        let h = unit_plane(normal, offset)?;
        let mv = self.inner.mass_halfspace_mc(&h, samples, seed).map_err(err)?;
        Ok((mv.value, mv.error_bound))
    }

    fn density_at(&self, x: Vec<f64>) -> f64 {
        self.inner.density_at(&vector(x))
    }

    fn __repr__(&self) -> String {
        format!("Measure(dim={}, analytic={})", self.inner.dim(), self.inner.is_analytic())
    }
}

/// Offsets achieving mass `alpha` for the normal `v`:
/// returns `(lambda_min, lambda_max, chosen)`.
#[pyfunction]
#[pyo3(signature = (measure, v, alpha, tol = 1e-9))]
fn solve_offset(measure: &PyMeasure, v: Vec<f64>, alpha: f64, tol: f64) -> PyResult<(f64, f64, f64)> {
    let v = vector(v).normalized().map_err(err)?;
    let sol = solve_lambda(&measure.inner, &v, alpha, tol).map_err(err)?;
    Ok((sol.lambda_min, sol.lambda_max, sol.chosen))
}

fn build_problem(measures: Vec<PyMeasure>, alphas: Vec<f64>) -> PyResult<Problem> {
    Problem::new(measures.into_iter().map(|m| m.inner).collect(), alphas, None).map_err(err)
}

fn build_config(
    tol: Option<f64>,
    scan_resolution: usize,
    starts: usize,
    seed: u64,
    certify: bool,
) -> SolveConfig {
    SolveConfig {
        mass_tol: tol,
        scan_resolution,
        starts,
        seed,
        certify,
        ..Default::default()
    }
}

/// Searches for a splitting hyperplane; returns the report dict
/// (status "found" or "not_found", mirroring the CLI JSON).
#[pyfunction]
#[pyo3(signature = (measures, alphas, tol = None, scan_resolution = 512, starts = 8, seed = 0, certify = false))]
fn find_split<'py>(
    py: Python<'py>,
    measures: Vec<PyMeasure>,
    alphas: Vec<f64>,
    tol: Option<f64>,
    scan_resolution: usize,
    starts: usize,
    seed: u64,
    certify: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let problem = build_problem(measures, alphas)?;
    let cfg = build_config(tol, scan_resolution, starts, seed, certify);
    let eff_tol = cfg.effective_mass_tol(&problem);
    match solver::find_split(&problem, &cfg).map_err(err)? {
        SplitOutcome::Found(res) => {
            let verified =
                solver::verify_split(&problem, &res.hyperplane, eff_tol).map_err(err)?.pass;
            serialize_to_py(py, &schema::SplitReport::found(&res, verified))
        }
        SplitOutcome::NotFound(scan) => serialize_to_py(py, &schema::SplitReport::not_found(&scan)),
    }
}

/// Recomputes the masses of a proposed split against the Monte-Carlo
/// oracle; returns a dict with `pass`, `recomputed`, `monte_carlo`.
#[pyfunction]
#[pyo3(signature = (measures, alphas, normal, offset, tol = 1e-6))]
fn verify_split<'py>(
    py: Python<'py>,
    measures: Vec<PyMeasure>,
    alphas: Vec<f64>,
    normal: Vec<f64>,
    offset: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let problem = build_problem(measures, alphas)?;
    let h = unit_plane(normal, offset)?;
    let rep = solver::verify_split(&problem, &h, tol).map_err(err)?;
    let dict = PyDict::new(py);
    dict.set_item("pass", rep.pass)?;
    dict.set_item(
        "recomputed",
        rep.recomputed.iter().map(|m| (m.value, m.error_bound)).collect::<Vec<_>>(),
    )?;
    dict.set_item(
        "monte_carlo",
        rep.monte_carlo.iter().map(|m| (m.value, m.error_bound)).collect::<Vec<_>>(),
    )?;
    dict.set_item("residual_norm", rep.residual_norm)?;
    Ok(dict.into_any())
}

/// The reduced residual (offset differences) at a normal.
#[pyfunction]
#[pyo3(signature = (measures, alphas, v, tol = 1e-9))]
fn reduced_residual(
    measures: Vec<PyMeasure>,
    alphas: Vec<f64>,
    v: Vec<f64>,
    tol: f64,
) -> PyResult<Vec<f64>> {
    let problem = build_problem(measures, alphas)?;
    let v = vector(v).normalized().map_err(err)?;
    solver::reduced_residual(&problem, &v, tol).map_err(err)
}

/// Scans the reduced-residual norm over a deterministic normal lattice.
#[pyfunction]
#[pyo3(signature = (measures, alphas, resolution = 1024))]
fn scan_residual<'py>(
    py: Python<'py>,
    measures: Vec<PyMeasure>,
    alphas: Vec<f64>,
    resolution: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let problem = build_problem(measures, alphas)?;
    let scan = solver::scan_residual(&problem, resolution).map_err(err)?;
    serialize_to_py(py, &schema::ScanReport::from_scan(&scan))
}

/// Strict separability of point sets (one list of points per set).
#[pyfunction]
#[pyo3(signature = (sets, margin = 1e-7))]
fn check_separable<'py>(
    py: Python<'py>,
    sets: Vec<Vec<Vec<f64>>>,
    margin: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let sets = sets
        .into_iter()
        .map(|pts| PointSet::new(pts.into_iter().map(vector).collect()).map_err(err))
        .collect::<PyResult<Vec<_>>>()?;
    let report = separability::check_separable(&sets, margin).map_err(err)?;
    serialize_to_py(py, &schema::SeparabilityFile::from_report(&report))
}

/// Strict separability of the supports of measures.
#[pyfunction]
#[pyo3(signature = (measures, margin = 1e-7))]
fn check_separable_supports<'py>(
    py: Python<'py>,
    measures: Vec<PyMeasure>,
    margin: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let sets: Vec<PointSet> =
        measures.iter().map(|m| PointSet::from_support(&m.inner)).collect();
    let report = separability::check_separable(&sets, margin).map_err(err)?;
    serialize_to_py(py, &schema::SeparabilityFile::from_report(&report))
}

/// A separating hyperplane for one sign pattern, or None.
#[pyfunction]
#[pyo3(signature = (sets, pattern, margin = 1e-7))]
fn separating_hyperplane(
    sets: Vec<Vec<Vec<f64>>>,
    pattern: Vec<i8>,
    margin: f64,
) -> PyResult<Option<(Vec<f64>, f64)>> {
    let sets = sets
        .into_iter()
        .map(|pts| PointSet::new(pts.into_iter().map(vector).collect()).map_err(err))
        .collect::<PyResult<Vec<_>>>()?;
    let sigma = SignPattern::total(pattern);
    let h = separability::separating_hyperplane(&sets, &sigma, margin).map_err(err)?;
    Ok(h.map(|h| (h.normal().0.clone(), h.offset())))
}

#[pyfunction]
fn hulls_disjoint(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> PyResult<bool> {
    let a = PointSet::new(a.into_iter().map(vector).collect()).map_err(err)?;
    let b = PointSet::new(b.into_iter().map(vector).collect()).map_err(err)?;
    separability::hulls_disjoint(&a, &b).map_err(err)
}

/// Samples the central sphere on a uniform angle grid; rows are
/// `(angle, x, y, fallback)`.
#[pyfunction]
#[pyo3(signature = (measure, alpha, grid = 1440, container = None, tol = 1e-10))]
fn central_sphere(
    measure: &PyMeasure,
    alpha: f64,
    grid: usize,
    container: Option<(Vec<f64>, f64)>,
    tol: f64,
) -> PyResult<Vec<(f64, f64, f64, bool)>> {
    let cont = parse_container(container, &measure.inner);
    let sample = sample_central_sphere(&measure.inner, &cont, alpha, grid, tol).map_err(err)?;
    Ok(sample
        .angles
        .iter()
        .zip(&sample.points)
        .zip(&sample.fallback)
        .map(|((a, p), f)| (*a, p.0[0], p.0[1], *f))
        .collect())
}

/// Turning number (full turns of the tangent) of a closed planar curve.
#[pyfunction]
fn curve_turning_number(points: Vec<Vec<f64>>) -> PyResult<i32> {
    let pts: Vec<Vector> = points.into_iter().map(vector).collect();
    turning_number(&pts).map_err(err)
}

/// Anchor point on the solving hyperplane for a normal, selected by the
/// three-case rule on a ball container.
#[pyfunction]
#[pyo3(signature = (measure, v, alpha, container = None, tol = 1e-9))]
fn aux_point(
    measure: &PyMeasure,
    v: Vec<f64>,
    alpha: f64,
    container: Option<(Vec<f64>, f64)>,
    tol: f64,
) -> PyResult<Vec<f64>> {
    let cont = parse_container(container, &measure.inner);
    let v = vector(v).normalized().map_err(err)?;
    Ok(auxiliary::aux_point(&measure.inner, &cont, alpha, &v, tol).map_err(err)?.0)
}

/// Two-line partition of a planar measure; returns the report dict.
#[pyfunction]
#[pyo3(signature = (measure, alphas, normal = vec![0.0, 1.0], tol = None, scan_resolution = 256))]
fn two_line_partition<'py>(
    py: Python<'py>,
    measure: &PyMeasure,
    alphas: [f64; 4],
    normal: Vec<f64>,
    tol: Option<f64>,
    scan_resolution: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = build_config(tol, scan_resolution, 8, 0, false);
    let part =
        partition::two_line_partition(&measure.inner, alphas, &vector(normal), &cfg).map_err(err)?;
    let max_error = part
        .quadrant_masses
        .iter()
        .zip(&alphas)
        .map(|(q, a)| (q - a).abs())
        .fold(0.0, f64::max);
    serialize_to_py(
        py,
        &schema::TwoLineFile {
            schema: schema::SCHEMA_VERSION,
            h1: part.h1.clone(),
            h2: part.h2.clone(),
            quadrant_masses: part.quadrant_masses,
            targets: alphas,
            max_error,
        },
    )
}

fn call_map(g: &Py<PyAny>, x: &Vector) -> Vec<f64> {
    Python::attach(|py| {
        g.call1(py, (x.0.clone(),))
            .and_then(|v| v.extract::<Vec<f64>>(py))
            .unwrap_or_else(|_| vec![f64::NAN; x.dim()])
    })
}

/// Face sign conditions of a callable map on a box; returns the
/// certificate dict.
#[pyfunction]
#[pyo3(signature = (g, lower, upper, grid = 17))]
fn miranda_check_faces<'py>(
    py: Python<'py>,
    g: Py<PyAny>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    grid: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let region = BoxRegion::new(vector(lower), vector(upper)).map_err(err)?;
    let map = |x: &Vector| call_map(&g, x);
    let cert = check_faces(&map, &region, grid).map_err(err)?;
    serialize_to_py(py, &cert)
}

/// Subdivision localization of a zero of a callable map; returns the
/// certificate dict of the first certified box, or None.
#[pyfunction]
#[pyo3(signature = (g, lower, upper, tol = 1e-6, max_depth = 60, grid = 17))]
fn miranda_localize<'py>(
    py: Python<'py>,
    g: Py<PyAny>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    tol: f64,
    max_depth: usize,
    grid: usize,
) -> PyResult<Option<Bound<'py, PyAny>>> {
    let region = BoxRegion::new(vector(lower), vector(upper)).map_err(err)?;
    let map = |x: &Vector| call_map(&g, x);
    match miranda_root(&map, &region, tol, max_depth, grid).map_err(err)? {
        Some((_, cert)) => Ok(Some(serialize_to_py(py, &cert)?)),
        None => Ok(None),
    }
}

/// Builds and runs a named scenario; returns the graded report dict.
#[pyfunction]
#[pyo3(signature = (name, alpha = None, seed = None, dim = None, scan_resolution = 512, curve_grid = 1440))]
fn run_scenario<'py>(
    py: Python<'py>,
    name: &str,
    alpha: Option<f64>,
    seed: Option<u64>,
    dim: Option<usize>,
    scan_resolution: usize,
    curve_grid: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let desc = scenario::Descriptor { name: name.to_string(), alpha, seed, dim };
    let built = scenario::build_with(&desc).map_err(err)?;
    let settings = scenario::RunSettings {
        solve: SolveConfig { scan_resolution, ..Default::default() },
        curve_grid,
    };
    let report = scenario::run(&built, &settings).map_err(err)?;
    serialize_to_py(py, &schema::ScenarioFile { schema: schema::SCHEMA_VERSION, report })
}

/// The one-sided anchor-curve limits at the three-caps gap normal.
#[pyfunction]
#[pyo3(signature = (epsilon = 1e-3))]
fn three_caps_probe(epsilon: f64) -> PyResult<(Vec<f64>, Vec<f64>, f64)> {
    let built = scenario::build("three_caps").map_err(err)?;
    let scenario::Payload::Discontinuity { measure, container, alpha } = &built.payload else {
        return Err(PyRuntimeError::new_err("unexpected payload"));
    };
    let (l, r, gap) =
        scenario::discontinuity_probe(measure, container, *alpha, epsilon).map_err(err)?;
    Ok((l.0, r.0, gap))
}

#[pymodule]
fn hamsplit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMeasure>()?;
    m.add_function(wrap_pyfunction!(solve_offset, m)?)?;
    m.add_function(wrap_pyfunction!(find_split, m)?)?;
    m.add_function(wrap_pyfunction!(verify_split, m)?)?;
    m.add_function(wrap_pyfunction!(reduced_residual, m)?)?;
    m.add_function(wrap_pyfunction!(scan_residual, m)?)?;
    m.add_function(wrap_pyfunction!(check_separable, m)?)?;
    m.add_function(wrap_pyfunction!(check_separable_supports, m)?)?;
    m.add_function(wrap_pyfunction!(separating_hyperplane, m)?)?;
    m.add_function(wrap_pyfunction!(hulls_disjoint, m)?)?;
    m.add_function(wrap_pyfunction!(central_sphere, m)?)?;
    m.add_function(wrap_pyfunction!(curve_turning_number, m)?)?;
    m.add_function(wrap_pyfunction!(aux_point, m)?)?;
    m.add_function(wrap_pyfunction!(two_line_partition, m)?)?;
    m.add_function(wrap_pyfunction!(miranda_check_faces, m)?)?;
    m.add_function(wrap_pyfunction!(miranda_localize, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(three_caps_probe, m)?)?;
    Ok(())
}
