//! Geodesic sprays `T(s, t) = exp_{σ(s)}(t ξ(s))` and the explicit
//! isometries `T_S2: X² → S²` and `T_L2: X² → L2`.
//!
//! `X²` is `ℝ²` with `g(∂s, ∂s) = t²`, `g(∂s, ∂t) = 1`, `g(∂t, ∂t) = 0`.
//! `L2` carries `(−(dx¹)² + (dx²)²)/(x¹)²`, which is its own Ricci tensor.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::catalog::{model_metric, CatalogError, Metric, ModelName};
use crate::geodesic::{
    flow_samples, flow_to, variation_velocity, CoverageMap, Flow, GeodesicError, GridSpec, IntegratorOptions, Reach,
};
use crate::get_model;
use crate::pseudosphere::{minkowski_inner, MinkowskiVec3};
use crate::tensor::{ChristoffelField, Point2, TangentVector2};

#[derive(Debug, Error)]
pub enum SprayError {
    #[error("base curve is not a null geodesic: {0}")]
    NotNullGeodesic(String),
    #[error("bad spray field normalization: {0}")]
    BadNormalization(String),
    #[error("(s, t) = ({s}, {t}) is outside the chart domain")]
    Domain { s: f64, t: f64 },
    #[error("differentiation failed at (s, t) = ({s}, {t})")]
    DifferentiationFailure { s: f64, t: f64 },
    #[error("unknown map {0:?} (expected TS2, TL2 or composite)")]
    UnknownMap(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
}

/// `(g_ss, g_st, g_tt)`.
pub type Metric3 = [f64; 3];

pub struct XSquaredMetric;

impl XSquaredMetric {
    pub fn at(_s: f64, t: f64) -> Metric3 {
        [t * t, 1.0, 0.0]
    }
}

fn rel_tol(scale: f64) -> f64 {
    1e-10 * scale.max(1.0)
}

/// Null geodesic in a chart model, traced numerically from `σ(s0) = p0`,
/// `σ̇(s0) = v0`, with `ξ(s0) = xi0` extended by parallel transport.
#[derive(Debug, Clone)]
pub struct ChartSpray {
    pub model: ModelName,
    pub field: ChristoffelField,
    pub metric: Metric,
    pub s0: f64,
    pub p0: Point2,
    pub v0: TangentVector2,
    pub xi0: TangentVector2,
    pub opts: IntegratorOptions,
}

/// Null line `σ(s) = p + sη` of the pseudosphere, with
/// `ξ(s) = ξ₀ − s p − ½ s² η`, the parallel extension of `ξ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientSpray {
    pub p: MinkowskiVec3,
    pub eta: MinkowskiVec3,
    pub xi0: MinkowskiVec3,
}

#[derive(Debug, Clone)]
pub enum SprayKind {
    Chart(ChartSpray),
    Pseudosphere(AmbientSpray),
}

#[derive(Debug, Clone)]
pub struct SprayChart {
    pub kind: SprayKind,
    pub s_range: (f64, f64),
    pub t_range: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SprayPoint {
    Chart(Point2),
    Pseudosphere(MinkowskiVec3),
}

/// What defines the spray.
#[derive(Debug, Clone)]
pub enum SprayBase {
    Chart { model: ModelName, s0: f64, p0: Point2, v0: TangentVector2, xi0: TangentVector2 },
    Pseudosphere { p: MinkowskiVec3, eta: MinkowskiVec3, xi0: MinkowskiVec3 },
}

impl SprayBase {
    /// `σ(s) = s⁻¹(1, 1)`, `ξ = ½(1, −1)` in `L2`, based at `s0`.
    pub fn l2_null(s0: f64) -> Self {
        Self::Chart {
            model: ModelName::L2,
            s0,
            p0: Point2::new(1.0 / s0, 1.0 / s0),
            v0: TangentVector2::new(-1.0 / (s0 * s0), -1.0 / (s0 * s0)),
            xi0: TangentVector2::new(0.5, -0.5),
        }
    }

    /// `σ(s) = e₁ + s(e₂ + e₃)`, `ξ(0) = ½(e₂ − e₃)`.
    pub fn pseudosphere_null() -> Self {
        Self::Pseudosphere {
            p: MinkowskiVec3::new(1.0, 0.0, 0.0),
            eta: MinkowskiVec3::new(0.0, 1.0, 1.0),
            xi0: MinkowskiVec3::new(0.0, 0.5, -0.5),
        }
    }
}

pub fn build_spray(
    base: SprayBase,
    s_range: (f64, f64),
    t_range: (f64, f64),
    opts: &IntegratorOptions,
) -> Result<SprayChart, SprayError> {
    let kind = match base {
        SprayBase::Chart { model, s0, p0, v0, xi0 } => {
            let metric = model_metric(&model)?;
            let field = get_model(&model)?.field;
            field.check_domain(p0).map_err(GeodesicError::from)?;
            let g = |a: TangentVector2, b: TangentVector2| metric.inner(p0, a.coords(), b.coords());
            let gs = metric.at(p0).iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            let vv = g(v0, v0);
            if v0.norm() == 0.0 || vv.abs() > rel_tol(gs * v0.norm().powi(2)) {
                return Err(SprayError::NotNullGeodesic(format!("g(σ̇, σ̇) = {vv:e}")));
            }
            let xx = g(xi0, xi0);
            if xx.abs() > rel_tol(gs * xi0.norm().powi(2)) {
                return Err(SprayError::BadNormalization(format!("g(ξ, ξ) = {xx:e}")));
            }
            let vx = g(v0, xi0);
            if (vx - 1.0).abs() > 1e-10 {
                return Err(SprayError::BadNormalization(format!("g(σ̇, ξ) = {vx}")));
            }
            SprayKind::Chart(ChartSpray { model, field, metric, s0, p0, v0, xi0, opts: *opts })
        }
        SprayBase::Pseudosphere { p, eta, xi0 } => {
            let ip = |a: &MinkowskiVec3, b: &MinkowskiVec3| minkowski_inner(a, b);
            let checks = [("<σ,σ> − 1", ip(&p, &p) - 1.0), ("<σ,σ̇>", ip(&p, &eta)), ("<σ̇,σ̇>", ip(&eta, &eta))];
            if let Some((what, v)) = checks.iter().find(|(_, v)| v.abs() > 1e-10) {
                return Err(SprayError::NotNullGeodesic(format!("{what} = {v:e}")));
            }
            let checks = [("<σ,ξ>", ip(&p, &xi0)), ("<ξ,ξ>", ip(&xi0, &xi0)), ("<σ̇,ξ> − 1", ip(&eta, &xi0) - 1.0)];
            if let Some((what, v)) = checks.iter().find(|(_, v)| v.abs() > 1e-10) {
                return Err(SprayError::BadNormalization(format!("{what} = {v:e}")));
            }
            SprayKind::Pseudosphere(AmbientSpray { p, eta, xi0 })
        }
    };
    Ok(SprayChart { kind, s_range, t_range })
}

/// Base data along `σ` at `s`: `(σ(s), σ̇(s), ξ(s))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartBase {
    pub p: Point2,
    pub v: TangentVector2,
    pub xi: TangentVector2,
}

/// `T(s, t)` with `∂_s T` and `∂_t T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartEval {
    pub point: Point2,
    pub ds: [f64; 2],
    pub dt: [f64; 2],
}

impl ChartSpray {
    pub fn base(&self, s: f64) -> Result<ChartBase, SprayError> {
        let flow = Flow { field: &self.field, chart_floor: self.opts.chart_floor, frame: true, cols: 0 };
        let (p, v, x) = (self.p0, self.v0, self.xi0);
        let y0 = [p.x1, p.x2, v.xi1, v.xi2, x.xi1, x.xi2, v.xi1, v.xi2];
        let y = flow_to(&flow, y0, s - self.s0, &self.opts)?.map_err(|_| SprayError::Domain { s, t: 0.0 })?;
        Ok(ChartBase {
            p: Point2::new(y[0], y[1]),
            v: TangentVector2::new(y[2], y[3]),
            xi: TangentVector2::new(y[4], y[5]),
        })
    }

    fn spray_state(&self, b: &ChartBase) -> [f64; 8] {
        let dv = variation_velocity(&self.field, b.p, b.xi.coords(), b.v.coords(), [0.0, 0.0]);
        [b.p.x1, b.p.x2, b.xi.xi1, b.xi.xi2, b.v.xi1, b.v.xi2, dv[0], dv[1]]
    }

    fn unpack(y: &[f64; 8]) -> ChartEval {
        ChartEval { point: Point2::new(y[0], y[1]), ds: [y[4], y[5]], dt: [y[2], y[3]] }
    }

    /// `T(s, t)` and its partials; `∂_s T` is the variation field of the
    /// geodesic family, integrated alongside it.
    pub fn eval(&self, s: f64, t: f64) -> Result<ChartEval, SprayError> {
        let b = self.base(s)?;
        self.eval_from(&b, s, t)
    }

    pub fn eval_from(&self, b: &ChartBase, s: f64, t: f64) -> Result<ChartEval, SprayError> {
        let flow = Flow { field: &self.field, chart_floor: self.opts.chart_floor, frame: false, cols: 1 };
        let y = flow_to(&flow, self.spray_state(b), t, &self.opts)?.map_err(|_| SprayError::Domain { s, t })?;
        Ok(Self::unpack(&y))
    }

    /// The whole ray `t ↦ T(s, t)` over `t_range`, as far as it is defined.
    pub fn ray(&self, s: f64, t_range: (f64, f64)) -> Result<Vec<(f64, Point2)>, SprayError> {
        let b = self.base(s)?;
        let flow = Flow::geodesic(&self.field, self.opts.chart_floor);
        let y0 = [b.p.x1, b.p.x2, b.xi.xi1, b.xi.xi2];
        let (back, _) = flow_samples(&flow, y0, t_range.0, &self.opts)?;
        let (fwd, _) = flow_samples(&flow, y0, t_range.1, &self.opts)?;
        Ok(back.iter().skip(1).rev().chain(fwd.iter()).map(|(t, y)| (*t, Point2::new(y[0], y[1]))).collect())
    }

    fn metric3(&self, e: &ChartEval) -> Metric3 {
        let g = |a, b| self.metric.inner(e.point, a, b);
        [g(e.ds, e.ds), g(e.ds, e.dt), g(e.dt, e.dt)]
    }
}

impl AmbientSpray {
    pub fn sigma(&self, s: f64) -> MinkowskiVec3 {
        self.p + s * self.eta
    }

    pub fn xi(&self, s: f64) -> MinkowskiVec3 {
        self.xi0 - s * self.p - (0.5 * s * s) * self.eta
    }

    pub fn eval(&self, s: f64, t: f64) -> MinkowskiVec3 {
        self.sigma(s) + t * self.xi(s)
    }

    /// `(∂_s T, ∂_t T)`; `ξ' = −σ` along the line.
    pub fn partials(&self, s: f64, t: f64) -> [MinkowskiVec3; 2] {
        [self.eta - t * self.sigma(s), self.xi(s)]
    }
}

impl SprayChart {
    pub fn point(&self, s: f64, t: f64) -> Result<SprayPoint, SprayError> {
        Ok(match &self.kind {
            SprayKind::Chart(c) => SprayPoint::Chart(c.eval(s, t)?.point),
            SprayKind::Pseudosphere(a) => SprayPoint::Pseudosphere(a.eval(s, t)),
        })
    }

    /// `g(ξ, ξ)` and `g(σ̇, ξ) − 1` at `s`.
    pub fn frame_defect(&self, s: f64) -> Result<[f64; 2], SprayError> {
        Ok(match &self.kind {
            SprayKind::Chart(c) => {
                let b = c.base(s)?;
                let g = |a: TangentVector2, w: TangentVector2| c.metric.inner(b.p, a.coords(), w.coords());
                [g(b.xi, b.xi), g(b.v, b.xi) - 1.0]
            }
            SprayKind::Pseudosphere(a) => {
                let x = a.xi(s);
                [minkowski_inner(&x, &x), minkowski_inner(&a.eta, &x) - 1.0]
            }
        })
    }

    /// `n × n` nodes of `s_range × t_range`, row-major in `s`.
    pub fn grid(&self, n: usize) -> Vec<(f64, f64)> {
        let lerp = |(a, b): (f64, f64), i: usize| if n < 2 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
        (0..n).flat_map(|i| (0..n).map(move |j| (lerp(self.s_range, i), lerp(self.t_range, j)))).collect()
    }

    /// `s,t,x1,x2[,x3]` rows over an `n × n` grid (undefined nodes skipped).
    pub fn to_csv(&self, n: usize) -> String {
        let mut out = String::from(match self.kind {
            SprayKind::Chart(_) => "s,t,x1,x2\n",
            SprayKind::Pseudosphere(_) => "s,t,x1,x2,x3\n",
        });
        for (s, t) in self.grid(n) {
            match self.point(s, t) {
                Ok(SprayPoint::Chart(p)) => {
                    let _ = writeln!(out, "{s:.16e},{t:.16e},{:.16e},{:.16e}", p.x1, p.x2);
                }
                Ok(SprayPoint::Pseudosphere(x)) => {
                    let _ = writeln!(out, "{s:.16e},{t:.16e},{:.16e},{:.16e},{:.16e}", x.x1, x.x2, x.x3);
                }
                Err(_) => {}
            }
        }
        out
    }
}

/// Pullback of the model metric to `(s, t)`.
pub fn spray_metric(chart: &SprayChart, s: f64, t: f64) -> Result<Metric3, SprayError> {
    match &chart.kind {
        SprayKind::Chart(c) => Ok(c.metric3(&c.eval(s, t)?)),
        SprayKind::Pseudosphere(a) => {
            let [ds, dt] = a.partials(s, t);
            Ok([minkowski_inner(&ds, &ds), minkowski_inner(&ds, &dt), minkowski_inner(&dt, &dt)])
        }
    }
}

/// Largest `|g − g_X|` component over an `n × n` grid, with the node where it
/// occurs.
pub fn normal_form_defect(chart: &SprayChart, n: usize) -> Result<(f64, (f64, f64)), SprayError> {
    let nodes = chart.grid(n);
    let defects: Vec<Result<(f64, (f64, f64)), SprayError>> = nodes
        .par_iter()
        .map(|&(s, t)| {
            let g = spray_metric(chart, s, t)?;
            let x = XSquaredMetric::at(s, t);
            Ok(((0..3).map(|i| (g[i] - x[i]).abs()).fold(0.0, f64::max), (s, t)))
        })
        .collect();
    let mut worst = (0.0, nodes.first().copied().unwrap_or_default());
    for d in defects {
        let d = d?;
        if d.0 > worst.0 || d.0.is_nan() {
            worst = d;
        }
    }
    Ok(worst)
}

#[allow(non_snake_case)]
pub fn map_T_S2(s: f64, t: f64) -> MinkowskiVec3 {
    MinkowskiVec3::new(1.0 - t * s, s + 0.5 * t - 0.5 * t * s * s, s - 0.5 * t - 0.5 * t * s * s)
}

/// `(∂_s T_S2, ∂_t T_S2)`.
#[allow(non_snake_case)]
pub fn map_T_S2_partials(s: f64, t: f64) -> [MinkowskiVec3; 2] {
    [MinkowskiVec3::new(-t, 1.0 - t * s, 1.0 - t * s), MinkowskiVec3::new(-s, 0.5 - 0.5 * s * s, -0.5 - 0.5 * s * s)]
}

fn tl2_check(s: f64, t: f64) -> Result<f64, SprayError> {
    let d = s - 0.5 * s * s * t;
    if s > 0.0 && d > 0.0 && d.is_finite() {
        Ok(d)
    } else {
        Err(SprayError::Domain { s, t })
    }
}

/// `(s − ½s²t)⁻¹(1, −1) + (0, 2/s)` on `s > 0`, `t < 2/s`.
#[allow(non_snake_case)]
pub fn map_T_L2(s: f64, t: f64) -> Result<Point2, SprayError> {
    let x1 = 1.0 / tl2_check(s, t)?;
    Ok(Point2::new(x1, 2.0 / s - x1))
}

/// `[∂_s T_L2, ∂_t T_L2]` in coordinates.
#[allow(non_snake_case)]
pub fn map_T_L2_partials(s: f64, t: f64) -> Result<[[f64; 2]; 2], SprayError> {
    let d = tl2_check(s, t)?;
    let x1s = -(1.0 - s * t) / (d * d);
    let x1t = 0.5 * s * s / (d * d);
    Ok([[x1s, -x1s - 2.0 / (s * s)], [x1t, -x1t]])
}

/// Inverse of [`map_T_L2`] on its image `x¹ > 0`, `x¹ + x² > 0`.
#[allow(non_snake_case)]
pub fn map_T_L2_inverse(p: Point2) -> Result<(f64, f64), SprayError> {
    let sum = p.x1 + p.x2;
    if !(p.x1 > 0.0 && sum > 0.0 && sum.is_finite()) {
        return Err(SprayError::Domain { s: p.x1, t: p.x2 });
    }
    let s = 2.0 / sum;
    Ok((s, 2.0 * (s - 1.0 / p.x1) / (s * s)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsometryMap {
    /// `X² → S²`.
    TS2,
    /// `X² → L2`.
    TL2,
    /// `T_S2 ∘ T_L2⁻¹: L2 → S²`, on the image of `T_L2`.
    Composite,
}

impl FromStr for IsometryMap {
    type Err = SprayError;
    fn from_str(s: &str) -> Result<Self, SprayError> {
        match s {
            "TS2" => Ok(Self::TS2),
            "TL2" => Ok(Self::TL2),
            "composite" | "TS2oTL2inv" => Ok(Self::Composite),
            _ => Err(SprayError::UnknownMap(s.to_string())),
        }
    }
}

impl std::fmt::Display for IsometryMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::TS2 => "TS2",
            Self::TL2 => "TL2",
            Self::Composite => "composite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Differentiation {
    /// Closed-form Jacobians.
    #[default]
    Exact,
    /// Fourth-order central differences, `h = 1e-4·max(1, |x|)`.
    CentralFd4,
}

impl FromStr for Differentiation {
    type Err = SprayError;
    fn from_str(s: &str) -> Result<Self, SprayError> {
        match s {
            "exact" => Ok(Self::Exact),
            "fd" | "fd4" => Ok(Self::CentralFd4),
            _ => Err(SprayError::UnknownMap(s.to_string())),
        }
    }
}

/// Nodes `first × second`, `n × n`. For `TL2` the second coordinate is also
/// capped at `2/s − margin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryGrid {
    pub first: (f64, f64),
    pub second: (f64, f64),
    pub n: usize,
    pub margin: f64,
}

impl IsometryGrid {
    pub fn default_for(map: IsometryMap, n: usize) -> Self {
        match map {
            IsometryMap::TS2 => Self { first: (-2.0, 2.0), second: (-2.0, 2.0), n, margin: 0.0 },
            IsometryMap::TL2 => Self { first: (0.1, 3.0), second: (-3.0, f64::INFINITY), n, margin: 0.05 },
            IsometryMap::Composite => Self { first: (0.25, 3.0), second: (-0.2, 3.0), n, margin: 0.0 },
        }
    }

    pub fn nodes(&self, map: IsometryMap) -> Vec<(f64, f64)> {
        let n = self.n.max(1);
        let lerp = |a: f64, b: f64, i: usize| if n < 2 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            let s = lerp(self.first.0, self.first.1, i);
            let hi = match map {
                IsometryMap::TL2 => self.second.1.min(2.0 / s - self.margin),
                _ => self.second.1,
            };
            for j in 0..n {
                out.push((s, lerp(self.second.0, hi, j)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectRow {
    pub s: f64,
    pub t: f64,
    pub d: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct IsometryReport {
    pub map: IsometryMap,
    pub rows: Vec<DefectRow>,
    pub max_defect: f64,
}

impl IsometryReport {
    /// `s,t,d_ss,d_st,d_tt` rows (signed `pullback − source`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,t,d_ss,d_st,d_tt\n");
        for r in &self.rows {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", r.s, r.t, r.d[0], r.d[1], r.d[2]);
        }
        out
    }
}

fn fd4<const M: usize>(
    f: &dyn Fn(f64, f64) -> Result<[f64; M], SprayError>,
    s: f64,
    t: f64,
) -> Result<[[f64; M]; 2], SprayError> {
    let fail = |_| SprayError::DifferentiationFailure { s, t };
    let mut out = [[0.0; M]; 2];
    for (axis, x) in [s, t].into_iter().enumerate() {
        let h = 1e-4 * x.abs().max(1.0);
        let at = |k: f64| if axis == 0 { f(s + k * h, t) } else { f(s, t + k * h) };
        let (m2, m1, p1, p2) =
            (at(-2.0).map_err(fail)?, at(-1.0).map_err(fail)?, at(1.0).map_err(fail)?, at(2.0).map_err(fail)?);
        for i in 0..M {
            out[axis][i] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
        }
    }
    Ok(out)
}

fn l2_metric3(p: Point2, a: [f64; 2], b: [f64; 2]) -> Metric3 {
    let w = 1.0 / (p.x1 * p.x1);
    let g = |u: [f64; 2], v: [f64; 2]| w * (u[1] * v[1] - u[0] * v[0]);
    [g(a, a), g(a, b), g(b, b)]
}

fn minkowski3(a: [f64; 3], b: [f64; 3]) -> Metric3 {
    let (a, b) = (MinkowskiVec3::new(a[0], a[1], a[2]), MinkowskiVec3::new(b[0], b[1], b[2]));
    [minkowski_inner(&a, &a), minkowski_inner(&a, &b), minkowski_inner(&b, &b)]
}

fn composite(x1: f64, x2: f64) -> Result<[f64; 3], SprayError> {
    let (s, t) = map_T_L2_inverse(Point2::new(x1, x2))?;
    Ok(map_T_S2(s, t).coords())
}

/// Pullback of the target metric and the source metric at one node.
pub fn isometry_pullback(
    map: IsometryMap,
    s: f64,
    t: f64,
    diff: Differentiation,
) -> Result<(Metric3, Metric3), SprayError> {
    match map {
        IsometryMap::TS2 => {
            let [ds, dt] = match diff {
                Differentiation::Exact => map_T_S2_partials(s, t).map(|v| v.coords()),
                Differentiation::CentralFd4 => fd4(&|s, t| Ok(map_T_S2(s, t).coords()), s, t)?,
            };
            Ok((minkowski3(ds, dt), XSquaredMetric::at(s, t)))
        }
        IsometryMap::TL2 => {
            let p = map_T_L2(s, t)?;
            let [ds, dt] = match diff {
                Differentiation::Exact => map_T_L2_partials(s, t)?,
                Differentiation::CentralFd4 => fd4(&|s, t| map_T_L2(s, t).map(|p| [p.x1, p.x2]), s, t)?,
            };
            Ok((l2_metric3(p, ds, dt), XSquaredMetric::at(s, t)))
        }
        IsometryMap::Composite => {
            let p = Point2::new(s, t);
            let [d1, d2] = match diff {
                Differentiation::Exact => {
                    let (a, b) = map_T_L2_inverse(p)?;
                    let [js, jt] = map_T_L2_partials(a, b)?;
                    // Columns of J_L2⁻¹ give ∂(s, t)/∂x¹ and ∂(s, t)/∂x².
                    let det = js[0] * jt[1] - jt[0] * js[1];
                    let inv = [[jt[1] / det, -js[1] / det], [-jt[0] / det, js[0] / det]];
                    let [ps, pt] = map_T_S2_partials(a, b);
                    let col = |k: usize| (inv[0][k] * ps + inv[1][k] * pt).coords();
                    [col(0), col(1)]
                }
                Differentiation::CentralFd4 => fd4(&composite, s, t)?,
            };
            let g = catalog_l2_metric(p);
            Ok((minkowski3(d1, d2), g))
        }
    }
}

fn catalog_l2_metric(p: Point2) -> Metric3 {
    let w = 1.0 / (p.x1 * p.x1);
    [-w, 0.0, w]
}

/// `pullback(target) − source` over the grid.
pub fn verify_isometry(
    map: IsometryMap,
    grid: &IsometryGrid,
    diff: Differentiation,
) -> Result<IsometryReport, SprayError> {
    let rows: Vec<Result<DefectRow, SprayError>> = grid
        .nodes(map)
        .into_par_iter()
        .map(|(s, t)| {
            let (pull, src) = isometry_pullback(map, s, t, diff)?;
            Ok(DefectRow { s, t, d: [pull[0] - src[0], pull[1] - src[1], pull[2] - src[2]] })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let max_defect = rows.iter().flat_map(|r| r.d).map(f64::abs).fold(0.0, f64::max);
    Ok(IsometryReport { map, rows, max_defect })
}

/// Smallest image distance between distinct nodes of an `n × n` grid.
pub fn min_image_separation(map: IsometryMap, grid: &IsometryGrid) -> Result<f64, SprayError> {
    let images: Vec<[f64; 3]> = grid
        .nodes(map)
        .into_iter()
        .map(|(s, t)| match map {
            IsometryMap::TS2 => Ok(map_T_S2(s, t).coords()),
            IsometryMap::TL2 => map_T_L2(s, t).map(|p| [p.x1, p.x2, 0.0]),
            IsometryMap::Composite => composite(s, t),
        })
        .collect::<Result<_, _>>()?;
    let d = (0..images.len())
        .into_par_iter()
        .map(|a| {
            let mut m = f64::INFINITY;
            for b in a + 1..images.len() {
                let d = (0..3).map(|k| (images[a][k] - images[b][k]).powi(2)).sum::<f64>().sqrt();
                m = m.min(d);
            }
            m
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpineKind {
    /// Spacelike unit spine with timelike unit rays: `cosh²t ds² − dt²`.
    Vertical,
    /// Timelike unit spine with spacelike unit rays: `−cos²t ds² + dt²`.
    Horizontal,
}

impl FromStr for SpineKind {
    type Err = SprayError;
    fn from_str(s: &str) -> Result<Self, SprayError> {
        match s {
            "vertical" => Ok(Self::Vertical),
            "horizontal" => Ok(Self::Horizontal),
            _ => Err(SprayError::UnknownMap(s.to_string())),
        }
    }
}

impl SpineKind {
    pub fn expected_metric(&self, t: f64) -> Metric3 {
        match self {
            Self::Vertical => [t.cosh().powi(2), 0.0, -1.0],
            Self::Horizontal => [-t.cos().powi(2), 0.0, 1.0],
        }
    }

    /// Spine through `(1, 0)` and the ray direction there.
    fn initial(&self) -> (TangentVector2, TangentVector2) {
        match self {
            Self::Vertical => (TangentVector2::new(0.0, 1.0), TangentVector2::new(1.0, 0.0)),
            Self::Horizontal => (TangentVector2::new(1.0, 0.0), TangentVector2::new(0.0, 1.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpineOptions {
    pub s_range: (f64, f64),
    pub t_range: (f64, f64),
    /// Metric check nodes per side.
    pub n: usize,
    /// Rays traced for the crossing and coverage findings.
    pub rays: usize,
    pub window: [f64; 4],
    pub cells: usize,
    pub integrator: IntegratorOptions,
}

impl SpineOptions {
    pub fn default_for(kind: SpineKind) -> Self {
        let (s_range, t_range) = match kind {
            SpineKind::Vertical => ((-1.2, 1.2), (-1.0, 1.0)),
            SpineKind::Horizontal => ((-2.0, 2.0), (-1.4, 1.4)),
        };
        Self {
            s_range,
            t_range,
            n: 21,
            rays: 41,
            window: [0.0, 4.0, -4.0, 4.0],
            cells: 40,
            integrator: IntegratorOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpineReport {
    pub kind: SpineKind,
    pub chart: ChartSpray,
    /// Largest deviation from the expected metric over defined nodes.
    pub metric_defect: f64,
    pub nodes_checked: usize,
    /// Nodes where the ray had already left the chart.
    pub nodes_undefined: usize,
    /// Pairs of distinct rays whose traced images intersect inside the window.
    pub crossings: usize,
    /// Cells of the window touched by some ray.
    pub coverage: CoverageMap,
}

impl SpineReport {
    pub fn unreached_cells(&self) -> usize {
        self.coverage.count(Reach::Unreachable)
    }
}

fn segments_cross(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let orient = |p: Point2, q: Point2, r: Point2| (q.x1 - p.x1) * (r.x2 - p.x2) - (q.x2 - p.x2) * (r.x1 - p.x1);
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

fn bbox(poly: &[(f64, Point2)]) -> [f64; 4] {
    poly.iter().fold([f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY], |b, (_, p)| {
        [b[0].min(p.x1), b[1].max(p.x1), b[2].min(p.x2), b[3].max(p.x2)]
    })
}

fn polylines_cross(a: &[(f64, Point2)], b: &[(f64, Point2)]) -> bool {
    let (ba, bb) = (bbox(a), bbox(b));
    if ba[1] < bb[0] || bb[1] < ba[0] || ba[3] < bb[2] || bb[3] < ba[2] {
        return false;
    }
    for u in a.windows(2) {
        for v in b.windows(2) {
            if segments_cross(u[0].1, u[1].1, v[0].1, v[1].1) {
                return true;
            }
        }
    }
    false
}

/// Builds the spine spray of `L2` through `(1, 0)` and samples the metric
/// form, ray crossings, and the part of a window the rays reach.
pub fn spine_sprays(kind: SpineKind, opts: &SpineOptions) -> Result<SpineReport, SprayError> {
    let (v0, xi0) = kind.initial();
    let model = ModelName::L2;
    let metric = model_metric(&model)?;
    let field = get_model(&model)?.field;
    let chart = ChartSpray { model, field, metric, s0: 0.0, p0: Point2::new(1.0, 0.0), v0, xi0, opts: opts.integrator };
    let spray = SprayChart { kind: SprayKind::Chart(chart.clone()), s_range: opts.s_range, t_range: opts.t_range };

    let checks: Vec<Option<f64>> = spray
        .grid(opts.n)
        .into_par_iter()
        .map(|(s, t)| match spray_metric(&spray, s, t) {
            Ok(g) => {
                let e = kind.expected_metric(t);
                Some((0..3).map(|i| (g[i] - e[i]).abs()).fold(0.0, f64::max))
            }
            Err(_) => None,
        })
        .collect();
    let nodes_checked = checks.iter().flatten().count();
    let metric_defect = checks.iter().flatten().fold(0.0f64, |m, d| m.max(*d));

    let lerp = |(a, b): (f64, f64), i: usize, n: usize| if n < 2 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
    // Rays follow the geodesic until it leaves the chart.
    let reach = (opts.t_range.0.min(-50.0), opts.t_range.1.max(50.0));
    // Rays sharing an asymptote are numerically indistinguishable near
    // blowup, so crossings are only looked for inside the window, on the
    // contiguous pieces of each ray that lie there.
    let [a, b, c, d] = opts.window;
    let inside = |p: &Point2| p.x1 >= a && p.x1 <= b && p.x2 >= c && p.x2 <= d;
    let runs: Vec<Vec<Vec<(f64, Point2)>>> = (0..opts.rays)
        .into_par_iter()
        .map(|i| {
            let ray = chart.ray(lerp(opts.s_range, i, opts.rays), reach)?;
            let mut out: Vec<Vec<(f64, Point2)>> = Vec::new();
            let mut cur = Vec::new();
            for sample in ray {
                if inside(&sample.1) {
                    cur.push(sample);
                } else if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            if !cur.is_empty() {
                out.push(cur);
            }
            Ok(out)
        })
        .collect::<Result<_, SprayError>>()?;
    let cross =
        |x: &[Vec<(f64, Point2)>], y: &[Vec<(f64, Point2)>]| x.iter().any(|u| y.iter().any(|v| polylines_cross(u, v)));
    let rays = runs;
    let pairs: Vec<(usize, usize)> = (0..rays.len()).flat_map(|a| (a + 1..rays.len()).map(move |b| (a, b))).collect();
    let crossings = pairs.par_iter().filter(|&&(i, j)| cross(&rays[i], &rays[j])).count();

    let grid = GridSpec::new(opts.window, opts.cells, opts.cells)?;
    // Dense rays for coverage: one per cell width along the spine at x¹ ≈ 1.
    let dense = (opts.rays * 8).max(4 * opts.cells);
    let (dx, dy) = grid.cell_size();
    let hits: Vec<Vec<usize>> = (0..dense)
        .into_par_iter()
        .map(|i| {
            let ray = chart.ray(lerp(opts.s_range, i, dense), reach)?;
            let mut out = Vec::new();
            for w in ray.windows(2) {
                let (a, b) = (w[0].1, w[1].1);
                if a.x1.max(b.x1) < opts.window[0]
                    || a.x1.min(b.x1) > opts.window[1]
                    || a.x2.max(b.x2) < opts.window[2]
                    || a.x2.min(b.x2) > opts.window[3]
                {
                    continue;
                }
                let span = ((b.x1 - a.x1) / dx).abs().max(((b.x2 - a.x2) / dy).abs());
                let m = (2.0 * span).ceil().clamp(1.0, 1e4) as usize;
                for k in 0..=m {
                    let f = k as f64 / m as f64;
                    if let Some((ci, cj)) = grid.locate(Point2::new(a.x1 + f * (b.x1 - a.x1), a.x2 + f * (b.x2 - a.x2)))
                    {
                        out.push(cj * grid.nx + ci);
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_, SprayError>>()?;
    let mut cells = vec![Reach::Unreachable; grid.nx * grid.ny];
    for idx in hits.into_iter().flatten() {
        cells[idx] = Reach::Reachable;
    }
    let coverage = CoverageMap { base: chart.p0, grid, cells, preimages: vec![None; grid.nx * grid.ny] };
    Ok(SpineReport {
        kind,
        chart,
        metric_defect,
        nodes_checked,
        nodes_undefined: checks.len() - nodes_checked,
        crossings,
        coverage,
    })
}
