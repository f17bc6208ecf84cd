//! Python bindings: models, classification, geodesics, exponential-map
//! coverage and the spray isometry checks.

use std::str::FromStr;

use affsurf::classify::{classify_type_a, classify_type_b, TypeAOptions, Witness};
use affsurf::geodesic::l2::l2_reachable as l2_reachable_rs;
use affsurf::geodesic::{
    conjugate_points as conjugate_points_rs, exp_coverage as exp_coverage_rs, integrate_geodesic as integrate_rs,
    CoverageOptions, GeodesicError, GeodesicIvp, GeodesicTrajectory, GridSpec, IntegratorOptions, Reach, Status,
};
use affsurf::pseudosphere::{
    coverage_universal_cover, pseudosphere_geodesic as ps_geodesic, LiftOptions, MinkowskiVec3, PseudospherePoint,
};
use affsurf::spray::{
    build_spray, normal_form_defect, spine_sprays, verify_isometry as verify_rs, Differentiation, IsometryGrid,
    IsometryMap, SpineKind, SpineOptions, SprayBase, SprayError,
};
use affsurf::{get_model, ChristoffelField, Coefficients, ModelName, NamedModel, Point2, TangentVector2};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn geo_err(e: GeodesicError) -> PyErr {
    match e {
        GeodesicError::InvalidIvp(_) | GeodesicError::Domain(_) => value_err(e),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn spray_err(e: SprayError) -> PyErr {
    match e {
        SprayError::UnknownMap(_) | SprayError::Catalog(_) => value_err(e),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn named(name: &str) -> PyResult<NamedModel> {
    let name = ModelName::from_str(name).map_err(value_err)?;
    get_model(&name).map_err(value_err)
}

fn options(tol: f64) -> PyResult<IntegratorOptions> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(value_err(format!("tol must be positive, got {tol}")));
    }
    Ok(IntegratorOptions::with_tol(tol))
}

/// A catalog connection model.
#[pyclass(frozen)]
pub struct Model {
    inner: NamedModel,
}

#[pymethods]
impl Model {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        Ok(Self { inner: named(name)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.to_string()
    }

    /// Six Christoffel symbols at `(x1, x2)`.
    fn christoffel_at(&self, x1: f64, x2: f64) -> PyResult<[f64; 6]> {
        let g = self.inner.field.christoffel_at(Point2::new(x1, x2)).map_err(value_err)?;
        Ok([g[0][0][0], g[0][0][1], g[0][1][0], g[0][1][1], g[1][1][0], g[1][1][1]])
    }

    fn ricci_at(&self, x1: f64, x2: f64) -> PyResult<[[f64; 2]; 2]> {
        Ok(self.inner.field.ricci_at(Point2::new(x1, x2)).map_err(value_err)?.c)
    }

    /// Components `∇_i ρ_jk`.
    fn nabla_ricci_at(&self, x1: f64, x2: f64) -> PyResult<[[[f64; 2]; 2]; 2]> {
        Ok(self.inner.field.nabla_ricci_at(Point2::new(x1, x2)).map_err(value_err)?.c)
    }

    fn is_locally_symmetric(&self) -> bool {
        self.inner.field.is_locally_symmetric()
    }

    fn is_flat(&self) -> bool {
        self.inner.field.is_flat()
    }

    #[pyo3(signature = (p0, v0, tspan, tol = 1e-10))]
    fn geodesic(&self, p0: (f64, f64), v0: (f64, f64), tspan: (f64, f64), tol: f64) -> PyResult<Trajectory> {
        integrate(&self.inner.field, p0, v0, tspan, tol)
    }

    fn __repr__(&self) -> String {
        format!("Model('{}')", self.inner.name)
    }
}

fn status_str(s: &Status) -> String {
    s.to_string()
}

/// An integrated geodesic.
#[pyclass(frozen)]
pub struct Trajectory {
    inner: GeodesicTrajectory,
}

#[pymethods]
impl Trajectory {
    /// `(t, x1, x2, v1, v2)` per accepted step.
    #[getter]
    fn samples(&self) -> Vec<(f64, f64, f64, f64, f64)> {
        self.inner.samples.iter().map(|s| (s.t, s.p.x1, s.p.x2, s.v.xi1, s.v.xi2)).collect()
    }

    #[getter]
    fn status_forward(&self) -> String {
        status_str(&self.inner.status_forward)
    }

    #[getter]
    fn status_backward(&self) -> String {
        status_str(&self.inner.status_backward)
    }

    /// Escape times `(backward, forward)`, `None` where the horizon was reached.
    #[getter]
    fn stop_times(&self) -> (Option<f64>, Option<f64>) {
        (self.inner.status_backward.stop_time(), self.inner.status_forward.stop_time())
    }

    /// `(λ, c, β)` for `L2` runs.
    #[getter]
    fn invariants(&self) -> Option<(f64, f64, Option<f64>)> {
        self.inner.conserved.map(|i| (i.lambda, i.c, i.beta))
    }

    fn conjugate_points(&self) -> PyResult<Vec<f64>> {
        conjugate_points_rs(&self.inner, &IntegratorOptions::default()).map_err(geo_err)
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }
}

fn integrate(
    field: &ChristoffelField,
    p0: (f64, f64),
    v0: (f64, f64),
    tspan: (f64, f64),
    tol: f64,
) -> PyResult<Trajectory> {
    let ivp = GeodesicIvp::new(field.clone(), Point2::new(p0.0, p0.1), TangentVector2::new(v0.0, v0.1), tspan)
        .map_err(geo_err)?;
    Ok(Trajectory { inner: integrate_rs(&ivp, &options(tol)?).map_err(geo_err)? })
}

/// Integrate a geodesic of a named model.
#[pyfunction]
#[pyo3(signature = (model, p0, v0, tspan, tol = 1e-10))]
fn integrate_geodesic(
    model: &str,
    p0: (f64, f64),
    v0: (f64, f64),
    tspan: (f64, f64),
    tol: f64,
) -> PyResult<Trajectory> {
    integrate(&named(model)?.field, p0, v0, tspan, tol)
}

/// Verdict of a classification.
#[pyclass(frozen, get_all)]
pub struct NormalForm {
    verdict: String,
    /// `identity`, `delta=…, gamma=…, a=…`, or a 2×2 matrix as text.
    witness: Option<String>,
    /// The linear witness `W` for Type A verdicts.
    matrix: Option<[[f64; 2]; 2]>,
    residual: f64,
}

#[pymethods]
impl NormalForm {
    fn __repr__(&self) -> String {
        match &self.witness {
            Some(w) => format!("{}, witness: {w}", self.verdict),
            None => self.verdict.clone(),
        }
    }
}

/// Normal form of a Type `A` or `B` chart given six coefficients as strings
/// (`"p/q"` or integers) or numbers.
#[pyfunction]
#[pyo3(signature = (kind, coefficients, starts = 64, seed = None))]
fn classify(kind: &str, coefficients: Vec<Bound<'_, PyAny>>, starts: usize, seed: Option<u64>) -> PyResult<NormalForm> {
    let items: Vec<String> = coefficients.iter().map(|c| c.str().map(|s| s.to_string())).collect::<PyResult<_>>()?;
    if items.len() != 6 {
        return Err(value_err(format!("expected six coefficients, got {}", items.len())));
    }
    let c = Coefficients::parse(&items).map_err(value_err)?;
    let nf = match kind {
        "A" | "a" => {
            let d = TypeAOptions::default();
            let opts = TypeAOptions { starts, seed: seed.unwrap_or(d.seed), ..d };
            classify_type_a(&c, &opts).map_err(|e| PyRuntimeError::new_err(e.to_string()))?
        }
        "B" | "b" => classify_type_b(&c),
        _ => return Err(value_err(format!("type must be 'A' or 'B', got {kind:?}"))),
    };
    let matrix = match &nf.witness {
        Some(Witness::Linear(w)) => Some(*w),
        _ => None,
    };
    Ok(NormalForm {
        verdict: nf.verdict.to_string(),
        witness: nf.witness.map(|w| w.to_string()),
        matrix,
        residual: nf.residual,
    })
}

/// Reachability grid of the exponential map.
#[pyclass(frozen)]
pub struct Coverage {
    map: affsurf::geodesic::CoverageMap,
}

#[pymethods]
impl Coverage {
    /// Rows from top (largest `x2`) down; `0` unreachable, `1` reachable, `2` unknown.
    #[getter]
    fn cells(&self) -> Vec<Vec<u8>> {
        let g = self.map.grid;
        (0..g.ny).rev().map(|j| (0..g.nx).map(|i| self.map.get(i, j) as u8).collect()).collect()
    }

    /// Center of cell `(i, j)`, with `j` counted from the bottom.
    fn center(&self, i: usize, j: usize) -> (f64, f64) {
        let c = self.map.grid.center(i, j);
        (c.x1, c.x2)
    }

    /// Cells with status `0`, `1` or `2`.
    fn count(&self, status: u8) -> PyResult<usize> {
        let r = match status {
            0 => Reach::Unreachable,
            1 => Reach::Reachable,
            2 => Reach::Unknown,
            _ => return Err(value_err("status must be 0, 1 or 2")),
        };
        Ok(self.map.count(r))
    }

    fn to_csv(&self) -> String {
        self.map.to_csv()
    }
}

/// Image of `exp` at `base` over `window = (x1_min, x1_max, x2_min, x2_max)`.
/// The pseudosphere chart is traced on its universal cover from `(0, 0)`.
#[pyfunction]
#[pyo3(signature = (model, base, window, cells = 40, angles = 1024, ray_length = 20.0))]
fn exp_coverage(
    model: &str,
    base: (f64, f64),
    window: [f64; 4],
    cells: usize,
    angles: usize,
    ray_length: f64,
) -> PyResult<Coverage> {
    let m = named(model)?;
    let grid = GridSpec::new(window, cells, cells).map_err(geo_err)?;
    if m.name == ModelName::PseudosphereChart {
        if base != (0.0, 0.0) {
            return Err(value_err("pseudosphere coverage is computed from base (0, 0)"));
        }
        let cov = coverage_universal_cover(&grid, angles, &LiftOptions::default())
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        return Ok(Coverage { map: cov.map });
    }
    let opts = CoverageOptions { angles, ray_length, ..CoverageOptions::default() };
    let map = exp_coverage_rs(&m.field, Point2::new(base.0, base.1), &grid, &opts).map_err(geo_err)?;
    Ok(Coverage { map })
}

/// Whether `exp_p` of `L2` reaches `q`.
#[pyfunction]
fn l2_reachable(p: (f64, f64), q: (f64, f64)) -> bool {
    l2_reachable_rs(Point2::new(p.0, p.1), Point2::new(q.0, q.1))
}

/// Point of the pseudosphere at parameter `t` along the geodesic from `p`
/// with tangent `xi`.
#[pyfunction]
fn pseudosphere_geodesic(p: [f64; 3], xi: [f64; 3], t: f64) -> PyResult<[f64; 3]> {
    let p = PseudospherePoint::new(MinkowskiVec3::new(p[0], p[1], p[2])).map_err(value_err)?;
    let q = ps_geodesic(&p, MinkowskiVec3::new(xi[0], xi[1], xi[2]), t).map_err(value_err)?;
    Ok(q.vec().coords())
}

/// `(max_defect, rows)` with rows `(s, t, d_ss, d_st, d_tt)`; `map` is
/// `TS2`, `TL2` or `composite`, `differentiation` `exact` or `fd`.
#[pyfunction]
#[pyo3(signature = (map, grid = 41, differentiation = "exact"))]
fn verify_isometry(map: &str, grid: usize, differentiation: &str) -> PyResult<(f64, Vec<(f64, f64, f64, f64, f64)>)> {
    let map = IsometryMap::from_str(map).map_err(spray_err)?;
    let diff = Differentiation::from_str(differentiation).map_err(spray_err)?;
    let r = verify_rs(map, &IsometryGrid::default_for(map, grid), diff).map_err(spray_err)?;
    Ok((r.max_defect, r.rows.iter().map(|w| (w.s, w.t, w.d[0], w.d[1], w.d[2])).collect()))
}

/// Largest deviation of a null spray's metric from `t² ds² + 2 ds dt`
/// (`chart` is `L2` or `pseudosphere`) over `grid × grid` nodes.
#[pyfunction]
#[pyo3(signature = (chart, grid = 41))]
fn spray_normal_form(chart: &str, grid: usize) -> PyResult<f64> {
    let (base, s_range, t_range) = match chart {
        "L2" => (SprayBase::l2_null(1.0), (0.5, 2.5), (-2.0, 0.7)),
        "pseudosphere" => (SprayBase::pseudosphere_null(), (-2.0, 2.0), (-2.0, 2.0)),
        _ => return Err(value_err(format!("unknown spray chart {chart:?}"))),
    };
    let spray = build_spray(base, s_range, t_range, &IntegratorOptions::default()).map_err(spray_err)?;
    Ok(normal_form_defect(&spray, grid).map_err(spray_err)?.0)
}

/// Spine spray of `L2` through `(1, 0)`: `(metric_defect, crossings,
/// unreached_cells, total_cells)`.
#[pyfunction]
fn spine_spray(kind: &str) -> PyResult<(f64, usize, usize, usize)> {
    let kind = SpineKind::from_str(kind).map_err(|_| value_err(format!("unknown spine kind {kind:?}")))?;
    let r = spine_sprays(kind, &SpineOptions::default_for(kind)).map_err(spray_err)?;
    Ok((r.metric_defect, r.crossings, r.unreached_cells(), r.coverage.cells.len()))
}

/// Catalog model names.
#[pyfunction]
fn models() -> Vec<String> {
    ModelName::all().iter().map(|m| m.to_string()).collect()
}

#[pymodule]
#[pyo3(name = "affsurf")]
fn affsurf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_class::<Trajectory>()?;
    m.add_class::<NormalForm>()?;
    m.add_class::<Coverage>()?;
    m.add_function(wrap_pyfunction!(models, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(exp_coverage, m)?)?;
    m.add_function(wrap_pyfunction!(l2_reachable, m)?)?;
    m.add_function(wrap_pyfunction!(pseudosphere_geodesic, m)?)?;
    m.add_function(wrap_pyfunction!(verify_isometry, m)?)?;
    m.add_function(wrap_pyfunction!(spray_normal_form, m)?)?;
    m.add_function(wrap_pyfunction!(spine_spray, m)?)?;
    Ok(())
}
