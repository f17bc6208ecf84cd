//! Geodesics, Jacobi fields and the exponential map of a connection chart.
//!
//! Everything runs on one adaptive Dormand–Prince 5(4) integrator. Jacobi
//! fields and derivatives of `exp` come from the variational equations,
//! which are integrated together with the geodesic.

mod coverage;
mod jacobi;
pub mod l2;
mod ode;

use std::fmt::Write as _;

use thiserror::Error;

use crate::tensor::{ChristoffelField, Coefficients, FieldKind, Point2, TangentVector2, TensorError};

pub use coverage::{exp_coverage, shoot, CoverageMap, CoverageOptions, GridSpec, Reach};
pub use jacobi::{conjugate_points, integrate_jacobi, JacobiField, JacobiSample};
pub use l2::{l2_closed_form, L2Family, MatchedGeodesic};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesicError {
    #[error("invalid initial value problem: {0}")]
    InvalidIvp(String),
    #[error("step budget exhausted at t = {t} after {steps} steps")]
    StepBudgetExceeded { t: f64, steps: usize },
    #[error("parameter out of domain: {0}")]
    ParamOutOfDomain(String),
    #[error("degenerate hyperbola fit (c = 0); line-form residual {line_residual:e}")]
    DegenerateFit { line_residual: f64 },
    #[error("parallel frame degenerate at t = {t}")]
    FrameDegenerate { t: f64 },
    #[error(transparent)]
    Domain(#[from] TensorError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    /// Per-step relative error bound.
    pub tol: f64,
    /// Type B charts terminate with `LeftChart` once `x¹ ≤ chart_floor`.
    pub chart_floor: f64,
    /// Blowup needs the state to exceed this ...
    pub blowup_norm: f64,
    /// ... while the adaptive step falls below this.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { tol: 1e-10, chart_floor: 0.0, blowup_norm: 1e8, min_step: 1e-12, max_steps: 2_000_000 }
    }
}

impl IntegratorOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// How an integration in one time direction ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Status {
    ReachedHorizon,
    /// Finite-time escape; `underflow` flags a step-size collapse without
    /// a large state.
    Blowup {
        t_escape: f64,
        underflow: bool,
    },
    LeftChart {
        t_exit: f64,
    },
}

impl Status {
    pub fn reached_horizon(&self) -> bool {
        matches!(self, Self::ReachedHorizon)
    }

    pub fn is_blowup(&self) -> bool {
        matches!(self, Self::Blowup { .. })
    }

    /// Where the integration stopped, if before the horizon.
    pub fn stop_time(&self) -> Option<f64> {
        match *self {
            Self::ReachedHorizon => None,
            Self::Blowup { t_escape, .. } => Some(t_escape),
            Self::LeftChart { t_exit } => Some(t_exit),
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::ReachedHorizon => f.write_str("ReachedHorizon"),
            Self::Blowup { t_escape, underflow: false } => write!(f, "Blowup(t_escape={t_escape:.12})"),
            Self::Blowup { t_escape, underflow: true } => write!(f, "Blowup(t_escape={t_escape:.12}, step underflow)"),
            Self::LeftChart { t_exit } => write!(f, "LeftChart(t_exit={t_exit:.12})"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeodesicIvp {
    pub field: ChristoffelField,
    pub p0: Point2,
    pub v0: TangentVector2,
    pub t_span: (f64, f64),
}

impl GeodesicIvp {
    pub fn new(
        field: ChristoffelField,
        p0: Point2,
        v0: TangentVector2,
        t_span: (f64, f64),
    ) -> Result<Self, GeodesicError> {
        let ivp = Self { field, p0, v0, t_span };
        ivp.validate()?;
        Ok(ivp)
    }

    fn validate(&self) -> Result<(), GeodesicError> {
        let (a, b) = self.t_span;
        if !(a.is_finite() && b.is_finite() && a <= 0.0 && 0.0 <= b && a < b) {
            return Err(GeodesicError::InvalidIvp(format!("t_span ({a}, {b}) must be finite and contain 0")));
        }
        if !(self.v0.xi1.is_finite() && self.v0.xi2.is_finite()) {
            return Err(GeodesicError::InvalidIvp("non-finite initial velocity".into()));
        }
        self.field.check_domain(self.p0)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub p: Point2,
    pub v: TangentVector2,
}

/// First integrals of an `L2` geodesic: `(ẋ²)² − (ẋ¹)² = λ(x¹)²`,
/// `ẋ² = c(x¹)²`, and, when `c ≠ 0`, the hyperbola
/// `(x¹)² − λ/c² = (x² + β)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Invariants {
    pub lambda: f64,
    pub c: f64,
    pub beta: Option<f64>,
}

impl L2Invariants {
    pub fn fit(p: Point2, v: TangentVector2) -> Self {
        let x1sq = p.x1 * p.x1;
        let c = v.xi2 / x1sq;
        let lambda = (v.xi2 * v.xi2 - v.xi1 * v.xi1) / x1sq;
        let beta = (v.xi2 != 0.0).then(|| p.x1 * v.xi1 / v.xi2 - p.x2);
        Self { lambda, c, beta }
    }
}

#[derive(Debug, Clone)]
pub struct GeodesicTrajectory {
    pub ivp: GeodesicIvp,
    /// Accepted steps in increasing `t`, including `t = 0`.
    pub samples: Vec<Sample>,
    pub status_forward: Status,
    pub status_backward: Status,
    /// Present for `L2` runs.
    pub conserved: Option<L2Invariants>,
}

impl GeodesicTrajectory {
    pub fn t_range(&self) -> (f64, f64) {
        (self.samples.first().map_or(0.0, |s| s.t), self.samples.last().map_or(0.0, |s| s.t))
    }

    pub fn end(&self) -> &Sample {
        self.samples.last().expect("trajectories hold at least the initial sample")
    }

    pub fn start(&self) -> &Sample {
        self.samples.first().expect("trajectories hold at least the initial sample")
    }

    /// `t,x1,x2,v1,v2` rows, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x1,x2,v1,v2\n");
        for s in &self.samples {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", s.t, s.p.x1, s.p.x2, s.v.xi1, s.v.xi2);
        }
        out
    }
}

pub(crate) fn is_l2(field: &ChristoffelField) -> bool {
    matches!(field, ChristoffelField::TypeB(c) if *c == Coefficients::from_ints([-1, 0, 0, -1, -1, 0]))
}

/// Geodesic flow with an optional parallel frame and `COLS` variation
/// columns. State layout: `x, v, [e₁, e₂], (δx, δv) × COLS`.
pub(crate) struct Flow<'a> {
    pub field: &'a ChristoffelField,
    pub chart_floor: f64,
    pub frame: bool,
    pub cols: usize,
}

#[inline]
fn quad(six: &[f64; 6], k: usize, a: [f64; 2], b: [f64; 2]) -> f64 {
    six[k] * a[0] * b[0] + six[2 + k] * (a[0] * b[1] + a[1] * b[0]) + six[4 + k] * a[1] * b[1]
}

impl Flow<'_> {
    pub fn geodesic(field: &ChristoffelField, chart_floor: f64) -> Flow<'_> {
        Flow { field, chart_floor, frame: false, cols: 0 }
    }

    fn in_chart(&self, x1: f64, x2: f64) -> bool {
        x1.is_finite() && x2.is_finite() && (self.field.kind() != FieldKind::TypeB || x1 > self.chart_floor)
    }

    fn eval<const N: usize>(&self, y: &[f64; N]) -> Option<[f64; N]> {
        debug_assert_eq!(N, 4 + 4 * self.frame as usize + 4 * self.cols);
        if !self.in_chart(y[0], y[1]) {
            return None;
        }
        let p = Point2::new(y[0], y[1]);
        let six = self.field.six_unchecked(p);
        let v = [y[2], y[3]];
        let mut out = [0.0; N];
        out[0] = v[0];
        out[1] = v[1];
        out[2] = -quad(&six, 0, v, v);
        out[3] = -quad(&six, 1, v, v);
        let mut off = 4;
        if self.frame {
            for e in 0..2 {
                let ev = [y[off + 2 * e], y[off + 2 * e + 1]];
                out[off + 2 * e] = -quad(&six, 0, v, ev);
                out[off + 2 * e + 1] = -quad(&six, 1, v, ev);
            }
            off += 4;
        }
        if self.cols > 0 {
            let grad = self.field.six_gradient_unchecked(p);
            for col in 0..self.cols {
                let b = off + 4 * col;
                let dx = [y[b], y[b + 1]];
                let dv = [y[b + 2], y[b + 3]];
                out[b] = dv[0];
                out[b + 1] = dv[1];
                for k in 0..2 {
                    let dgamma = dx[0] * quad(&grad[0], k, v, v) + dx[1] * quad(&grad[1], k, v, v);
                    out[b + 2 + k] = -dgamma - 2.0 * quad(&six, k, v, dv);
                }
            }
        }
        Some(out)
    }
}

impl<const N: usize> ode::System<N> for Flow<'_> {
    fn rhs(&self, y: &[f64; N]) -> Option<[f64; N]> {
        self.eval(y)
    }

    fn scale(&self, y: &[f64; N]) -> f64 {
        // Type B charts are invariant under x ↦ a·x, so errors are measured
        // relative to x¹ there.
        match self.field.kind() {
            FieldKind::TypeB => y[0].abs(),
            _ => 1.0,
        }
    }

    fn blowup_norm(&self, y: &[f64; N]) -> f64 {
        y[..4].iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `δv(0)` for a variation with `Y(0) = y0` and covariant derivative
/// `∇_σ̇ Y(0) = ydot0`.
pub(crate) fn variation_velocity(
    field: &ChristoffelField,
    p: Point2,
    v: [f64; 2],
    y0: [f64; 2],
    ydot0: [f64; 2],
) -> [f64; 2] {
    let six = field.six_unchecked(p);
    [ydot0[0] - quad(&six, 0, v, y0), ydot0[1] - quad(&six, 1, v, y0)]
}

pub fn integrate_geodesic(ivp: &GeodesicIvp, opts: &IntegratorOptions) -> Result<GeodesicTrajectory, GeodesicError> {
    ivp.validate()?;
    let flow = Flow::geodesic(&ivp.field, opts.chart_floor);
    let y0 = [ivp.p0.x1, ivp.p0.x2, ivp.v0.xi1, ivp.v0.xi2];
    let sample = |t: f64, y: &[f64; 4]| Sample { t, p: Point2::new(y[0], y[1]), v: TangentVector2::new(y[2], y[3]) };

    let mut back = Vec::new();
    let status_backward = ode::integrate(&flow, y0, ivp.t_span.0, opts, |t, y| back.push(sample(t, y)))?;
    let mut samples: Vec<Sample> = back.into_iter().skip(1).rev().collect();
    let status_forward = ode::integrate(&flow, y0, ivp.t_span.1, opts, |t, y| samples.push(sample(t, y)))?;
    let conserved = is_l2(&ivp.field).then(|| L2Invariants::fit(ivp.p0, ivp.v0));
    Ok(GeodesicTrajectory { ivp: ivp.clone(), samples, status_forward, status_backward, conserved })
}

/// The geodesic's state at `t_end`, or the status that stopped it first.
pub(crate) fn flow_to<const N: usize>(
    flow: &Flow<'_>,
    y0: [f64; N],
    t_end: f64,
    opts: &IntegratorOptions,
) -> Result<Result<[f64; N], Status>, GeodesicError> {
    let mut last = y0;
    let status = ode::integrate(flow, y0, t_end, opts, |_, y| last = *y)?;
    Ok(if status.reached_horizon() { Ok(last) } else { Err(status) })
}

/// Like [`flow_to`], recording every accepted step.
pub(crate) fn flow_samples<const N: usize>(
    flow: &Flow<'_>,
    y0: [f64; N],
    t_end: f64,
    opts: &IntegratorOptions,
) -> Result<(Vec<(f64, [f64; N])>, Status), GeodesicError> {
    let mut out = Vec::new();
    let status = ode::integrate(flow, y0, t_end, opts, |t, y| out.push((t, *y)))?;
    Ok((out, status))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpOutcome {
    Point(Point2),
    /// The geodesic stopped before `t = 1`.
    Incomplete(Status),
}

impl ExpOutcome {
    pub fn point(&self) -> Option<Point2> {
        match self {
            Self::Point(p) => Some(*p),
            Self::Incomplete(_) => None,
        }
    }
}

/// `exp_p(ξ)`: the geodesic with `v0 = ξ` evaluated at `t = 1`.
pub fn exp_map(
    field: &ChristoffelField,
    p: Point2,
    xi: TangentVector2,
    opts: &IntegratorOptions,
) -> Result<ExpOutcome, GeodesicError> {
    field.check_domain(p)?;
    let flow = Flow::geodesic(field, opts.chart_floor);
    Ok(match flow_to(&flow, [p.x1, p.x2, xi.xi1, xi.xi2], 1.0, opts)? {
        Ok(y) => ExpOutcome::Point(Point2::new(y[0], y[1])),
        Err(status) => ExpOutcome::Incomplete(status),
    })
}

/// `exp_p(ξ)` together with its derivative `d(exp_p)_ξ` (columns: `∂/∂ξ¹`,
/// `∂/∂ξ²`), or `None` when the geodesic is incomplete before `t = 1`.
pub fn exp_with_jacobian(
    field: &ChristoffelField,
    p: Point2,
    xi: TangentVector2,
    opts: &IntegratorOptions,
) -> Result<Option<(Point2, [[f64; 2]; 2])>, GeodesicError> {
    field.check_domain(p)?;
    let flow = Flow { field, chart_floor: opts.chart_floor, frame: false, cols: 2 };
    let y0 = [p.x1, p.x2, xi.xi1, xi.xi2, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
    Ok(match flow_to(&flow, y0, 1.0, opts)? {
        Ok(y) => Some((Point2::new(y[0], y[1]), [[y[4], y[8]], [y[5], y[9]]])),
        Err(_) => None,
    })
}

/// `max |(x¹)² − λ/c² − (x² + β)²|` over the samples, with `(λ, c, β)` fitted
/// from the initial condition. For `c = 0` the error carries the residual of
/// the line form `x² = const` instead.
pub fn hyperbola_residual(traj: &GeodesicTrajectory) -> Result<f64, GeodesicError> {
    let inv = L2Invariants::fit(traj.ivp.p0, traj.ivp.v0);
    let scale = traj.ivp.v0.norm().max(traj.ivp.p0.x1);
    match inv.beta {
        Some(beta) if inv.c.abs() > 1e-12 * scale / (traj.ivp.p0.x1 * traj.ivp.p0.x1) => {
            let k = inv.lambda / (inv.c * inv.c);
            Ok(traj.samples.iter().map(|s| (s.p.x1 * s.p.x1 - k - (s.p.x2 + beta).powi(2)).abs()).fold(0.0, f64::max))
        }
        _ => {
            let x2 = traj.ivp.p0.x2;
            let line_residual = traj.samples.iter().map(|s| (s.p.x2 - x2).abs()).fold(0.0, f64::max);
            Err(GeodesicError::DegenerateFit { line_residual })
        }
    }
}

/// Largest drift of the two `L2` first integrals along the samples.
pub fn l2_conservation_defect(traj: &GeodesicTrajectory) -> (f64, f64) {
    let inv = L2Invariants::fit(traj.ivp.p0, traj.ivp.v0);
    traj.samples.iter().fold((0.0, 0.0), |(a, b), s| {
        let x1sq = s.p.x1 * s.p.x1;
        let speed = s.v.xi2 * s.v.xi2 - s.v.xi1 * s.v.xi1 - inv.lambda * x1sq;
        let momentum = s.v.xi2 - inv.c * x1sq;
        (f64::max(a, speed.abs()), f64::max(b, momentum.abs()))
    })
}

/// The geodesic symmetry of `L2` about `(1, 0)`:
/// `(x¹, x²) ↦ (x¹, −x²)/((x¹)² − (x²)²)`.
pub fn geodesic_involution_l2(p: Point2) -> Result<Point2, GeodesicError> {
    let d = p.x1 * p.x1 - p.x2 * p.x2;
    if !(p.x1 > 0.0 && d > 0.0 && d.is_finite()) {
        return Err(TensorError::Domain { x1: p.x1, x2: p.x2 }.into());
    }
    Ok(Point2::new(p.x1 / d, -p.x2 / d))
}

/// Geodesic acceleration `−Γ(v, v)` at `p`.
pub fn geodesic_acceleration(
    field: &ChristoffelField,
    p: Point2,
    v: TangentVector2,
) -> Result<[f64; 2], GeodesicError> {
    let g = field.christoffel_at(p)?;
    let v = v.coords();
    let mut out = [0.0; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                out[k] -= g[i][j][k] * v[i] * v[j];
            }
        }
    }
    Ok(out)
}
