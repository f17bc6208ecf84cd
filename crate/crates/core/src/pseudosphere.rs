//! The pseudosphere `⟨x, x⟩ = 1` in Minkowski 3-space, its closed-form
//! geodesics, and the exponential map of its universal cover.
//!
//! The universal cover is the chart `T(u, v) = (cosh u cos v, cosh u sin v,
//! sinh u)`, whose connection is
//! [`pseudosphere_field`](crate::catalog::pseudosphere_field).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, PI};
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use rayon::prelude::*;
use thiserror::Error;

use crate::geodesic::{CoverageMap, GridSpec, Reach};
use crate::tensor::TangentVector2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PseudosphereError {
    #[error("point is off the pseudosphere: <v,v> = {norm}")]
    OffSurface { norm: f64 },
    #[error("direction is not tangent at the base point: <P,xi> = {inner}")]
    NotTangent { inner: f64 },
    #[error("zero tangent vector")]
    ZeroTangent,
    #[error("angle lift jumped by {jump} at t = {t}")]
    LiftAmbiguity { t: f64, jump: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MinkowskiVec3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

pub const E1: MinkowskiVec3 = MinkowskiVec3 { x1: 1.0, x2: 0.0, x3: 0.0 };
pub const E2: MinkowskiVec3 = MinkowskiVec3 { x1: 0.0, x2: 1.0, x3: 0.0 };
pub const E3: MinkowskiVec3 = MinkowskiVec3 { x1: 0.0, x2: 0.0, x3: 1.0 };

impl MinkowskiVec3 {
    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn inner(&self, other: &Self) -> f64 {
        minkowski_inner(self, other)
    }

    /// Euclidean length, used only for tolerances.
    pub fn euclid(&self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }
}

impl Add for MinkowskiVec3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for MinkowskiVec3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Neg for MinkowskiVec3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<MinkowskiVec3> for f64 {
    type Output = MinkowskiVec3;
    fn mul(self, v: MinkowskiVec3) -> MinkowskiVec3 {
        MinkowskiVec3::new(self * v.x1, self * v.x2, self * v.x3)
    }
}

/// `x₁y₁ + x₂y₂ − x₃y₃`.
pub fn minkowski_inner(x: &MinkowskiVec3, y: &MinkowskiVec3) -> f64 {
    x.x1 * y.x1 + x.x2 * y.x2 - x.x3 * y.x3
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudospherePoint {
    v: MinkowskiVec3,
}

impl PseudospherePoint {
    pub const BASE: Self = Self { v: E1 };

    pub fn new(v: MinkowskiVec3) -> Result<Self, PseudosphereError> {
        let norm = v.inner(&v);
        if (norm - 1.0).abs() <= 1e-10 * v.euclid().powi(2).max(1.0) {
            Ok(Self { v })
        } else {
            Err(PseudosphereError::OffSurface { norm })
        }
    }

    pub fn vec(&self) -> MinkowskiVec3 {
        self.v
    }

    /// Chart coordinates `(u, v)` with `v ∈ (−π, π]`.
    pub fn chart_coords(&self) -> (f64, f64) {
        (self.v.x3.asinh(), self.v.x2.atan2(self.v.x1))
    }
}

#[allow(non_snake_case)]
pub fn chart_T(u: f64, v: f64) -> PseudospherePoint {
    let c = u.cosh();
    PseudospherePoint { v: MinkowskiVec3::new(c * v.cos(), c * v.sin(), u.sinh()) }
}

/// Pullback of the ambient metric by the chart: `diag(−1, cosh²u)`.
pub fn chart_metric(u: f64) -> [[f64; 2]; 2] {
    [[-1.0, 0.0], [0.0, u.cosh().powi(2)]]
}

/// `dT_{(u,v)}(a ∂_u + b ∂_v)`.
pub fn chart_pushforward(u: f64, v: f64, w: TangentVector2) -> MinkowskiVec3 {
    let (s, c) = (u.sinh(), u.cosh());
    let du = MinkowskiVec3::new(s * v.cos(), s * v.sin(), c);
    let dv = MinkowskiVec3::new(-c * v.sin(), c * v.cos(), 0.0);
    w.xi1 * du + w.xi2 * dv
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalKind {
    Spacelike,
    Null,
    Timelike,
}

/// `t ↦ exp_P(tξ)`. `xi` is stored unit (or null as given) and `rate`
/// converts the caller's parameter to the unit one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbientGeodesic {
    pub base: PseudospherePoint,
    pub kind: CausalKind,
    pub xi: MinkowskiVec3,
    pub rate: f64,
}

impl AmbientGeodesic {
    pub fn new(p: PseudospherePoint, xi: MinkowskiVec3) -> Result<Self, PseudosphereError> {
        let len = xi.euclid();
        if len == 0.0 {
            return Err(PseudosphereError::ZeroTangent);
        }
        let inner = p.v.inner(&xi);
        if inner.abs() > 1e-10 * len * p.v.euclid() {
            return Err(PseudosphereError::NotTangent { inner });
        }
        let q = xi.inner(&xi);
        let (kind, rate) = if q.abs() <= 1e-12 * len * len {
            (CausalKind::Null, 1.0)
        } else if q > 0.0 {
            (CausalKind::Spacelike, q.sqrt())
        } else {
            (CausalKind::Timelike, (-q).sqrt())
        };
        Ok(Self { base: p, kind, xi: (1.0 / rate) * xi, rate })
    }

    pub fn position(&self, t: f64) -> MinkowskiVec3 {
        let (p, x, s) = (self.base.v, self.xi, self.rate * t);
        match self.kind {
            CausalKind::Spacelike => s.cos() * p + s.sin() * x,
            CausalKind::Null => p + s * x,
            CausalKind::Timelike => s.cosh() * p + s.sinh() * x,
        }
    }

    pub fn at(&self, t: f64) -> PseudospherePoint {
        PseudospherePoint { v: self.position(t) }
    }

    pub fn velocity(&self, t: f64) -> MinkowskiVec3 {
        let (p, x, s, k) = (self.base.v, self.xi, self.rate * t, self.rate);
        k * match self.kind {
            CausalKind::Spacelike => -s.sin() * p + s.cos() * x,
            CausalKind::Null => x,
            CausalKind::Timelike => s.sinh() * p + s.cosh() * x,
        }
    }

    /// `t,x1,x2,x3` rows at `n ≥ 2` evenly spaced parameters.
    pub fn to_csv(&self, t_range: (f64, f64), n: usize) -> String {
        let mut out = String::from("t,x1,x2,x3\n");
        let n = n.max(2);
        for i in 0..n {
            let t = t_range.0 + (t_range.1 - t_range.0) * i as f64 / (n - 1) as f64;
            let x = self.position(t);
            let _ = writeln!(out, "{t:.16e},{:.16e},{:.16e},{:.16e}", x.x1, x.x2, x.x3);
        }
        out
    }
}

/// `exp_P(tξ)`.
pub fn pseudosphere_geodesic(
    p: &PseudospherePoint,
    xi: MinkowskiVec3,
    t: f64,
) -> Result<PseudospherePoint, PseudosphereError> {
    Ok(AmbientGeodesic::new(*p, xi)?.at(t))
}

/// Whether `q` lies in the image of `exp_p`: with `a = ⟨p, q⟩`, every `a > −1`
/// is reached, `a = −1` only by `q = −p`, and `a < −1` never.
pub fn pseudosphere_reachable(p: &PseudospherePoint, q: &PseudospherePoint) -> bool {
    let a = p.v.inner(&q.v);
    let tol = 1e-12 * (1.0 + a.abs());
    if a > -1.0 + tol {
        true
    } else if a >= -1.0 - tol {
        (q.v + p.v).euclid() <= 1e-9 * (1.0 + q.v.euclid())
    } else {
        false
    }
}

/// Some `ξ` with `exp_p(ξ) = q`, if `q` is reachable. For `q = −p` every unit
/// spacelike `ξ` times `π` works; one is picked deterministically.
pub fn pseudosphere_log(p: &PseudospherePoint, q: &PseudospherePoint) -> Option<MinkowskiVec3> {
    if !pseudosphere_reachable(p, q) {
        return None;
    }
    let (pv, qv) = (p.v, q.v);
    let a = pv.inner(&qv);
    let w = qv - a * pv;
    let n = w.inner(&w);
    if w.euclid() <= 1e-12 * (1.0 + qv.euclid()) {
        if a > 0.0 {
            return Some(MinkowskiVec3::default());
        }
        // q = −p: any spacelike tangent, scaled to length π.
        let cand = [E2, E1, E3].into_iter().map(|e| e - e.inner(&pv) * pv).find(|e| e.inner(e) > 1e-6)?;
        return Some((PI / cand.inner(&cand).sqrt()) * cand);
    }
    if a < 1.0 - 1e-12 && n > 0.0 {
        let theta = a.clamp(-1.0, 1.0).acos();
        Some((theta / n.sqrt()) * w)
    } else if a > 1.0 + 1e-12 && n < 0.0 {
        let s = a.acosh();
        Some((s / (-n).sqrt()) * w)
    } else {
        // a ≈ 1: q − p is null and tangent.
        Some(qv - pv)
    }
}

/// Exact image of the exponential map of the universal cover at `(0, 0)`:
/// `(u, v)` is reached iff `|cosh u cos v| < 1`, or `|v| < π/2` and
/// `cosh u cos v ≥ 1`, or `(u, v)` is one of the focal points `(0, nπ)`.
pub fn universal_cover_reachable(u: f64, v: f64) -> bool {
    let a = u.cosh() * v.cos();
    if a.abs() < 1.0 || (v.abs() < FRAC_PI_2 && a >= 1.0) {
        return true;
    }
    u == 0.0 && (v / PI - (v / PI).round()).abs() < 1e-15
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftOptions {
    /// Largest allowed jump of the unwrapped angle between samples.
    pub max_angle_step: f64,
    /// Largest unit-speed parameter traced along each ray.
    pub max_parameter: f64,
    /// Null and timelike rays stop once `|u|` exceeds this.
    pub u_limit: f64,
    /// Smallest parameter step before the lift is declared ambiguous.
    pub min_step: f64,
}

impl Default for LiftOptions {
    fn default() -> Self {
        Self { max_angle_step: FRAC_PI_8, max_parameter: 4.0 * PI, u_limit: 10.0, min_step: 1e-12 }
    }
}

/// Chart geodesic through `(0, 0)` with initial chart velocity `w`, lifted
/// continuously to the `(u, v)` plane: `(t, u, v)` samples for
/// `t ∈ [0, t_max]` with step also capped so `|Δu|, |Δv| ≤ resolution`.
pub fn lift_chart_geodesic(
    w: TangentVector2,
    t_max: f64,
    resolution: f64,
    opts: &LiftOptions,
) -> Result<Vec<(f64, f64, f64)>, PseudosphereError> {
    let xi = chart_pushforward(0.0, 0.0, w);
    let geo = AmbientGeodesic::new(PseudospherePoint::BASE, xi)?;
    let cap = opts.max_angle_step.min(resolution);
    let mut out = vec![(0.0, 0.0, 0.0)];
    let (mut t, mut v_prev) = (0.0, 0.0);
    let mut h = cap / geo.rate.max(1e-300) / 4.0;
    h = h.min(t_max.max(0.0));
    while t < t_max {
        let step = h.min(t_max - t);
        let x = geo.position(t + step);
        let (u, v_raw) = (x.x3.asinh(), x.x2.atan2(x.x1));
        let v = v_raw + 2.0 * PI * ((v_prev - v_raw) / (2.0 * PI)).round();
        let du = (u - out.last().unwrap().1).abs();
        let jump = (v - v_prev).abs();
        if jump > cap || du > resolution {
            h = 0.5 * step;
            if h < opts.min_step * (1.0 + t.abs()) {
                return Err(PseudosphereError::LiftAmbiguity { t, jump });
            }
            continue;
        }
        t += step;
        v_prev = v;
        out.push((t, u, v));
        // Only spacelike rays come back in `u`.
        if u.abs() > opts.u_limit && geo.kind != CausalKind::Spacelike {
            break;
        }
        if jump < 0.25 * cap && du < 0.25 * resolution {
            h = 2.0 * step;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct UniversalCoverCoverage {
    pub map: CoverageMap,
    /// Largest distance of the lifted spacelike rays from `(0, nπ)` at
    /// parameter `nπ`.
    pub focal_defect: f64,
    /// Cells hit by a ray that the exact test declares unreachable, or vice
    /// versa cells the test declares reachable that no ray hit (`Unknown`).
    pub disagreements: usize,
}

/// Image of the exponential map at `(0, 0)` of the universal cover, sampled
/// by `angles` rays lifted from the pseudosphere. Cells a ray passes through
/// are `Reachable`; the rest are `Unreachable` when the exact test agrees and
/// `Unknown` otherwise.
pub fn coverage_universal_cover(
    grid: &GridSpec,
    angles: usize,
    opts: &LiftOptions,
) -> Result<UniversalCoverCoverage, PseudosphereError> {
    let (du, dv) = grid.cell_size();
    let resolution = 0.5 * du.min(dv);
    let v_reach = grid.window[2].abs().max(grid.window[3].abs());
    let opts = LiftOptions { u_limit: opts.u_limit.min(grid.window[0].abs().max(grid.window[1].abs()) + du), ..*opts };
    let rays: Vec<Result<(Vec<(usize, TangentVector2)>, f64), PseudosphereError>> = (0..angles)
        .into_par_iter()
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / angles as f64;
            let w = TangentVector2::new(phi.cos(), phi.sin());
            let q = w.xi2 * w.xi2 - w.xi1 * w.xi1;
            let rate = q.abs().sqrt();
            // Unit-speed budget: far enough to pass every focal point in the window.
            let unit_budget = opts.max_parameter.max(v_reach + PI);
            let t_max = if rate > 1e-9 { unit_budget / rate } else { 1e6 };
            let samples = lift_chart_geodesic(w, t_max, resolution, &opts)?;
            let mut focal = 0.0f64;
            if q > 1e-12 {
                let geo = AmbientGeodesic::new(PseudospherePoint::BASE, chart_pushforward(0.0, 0.0, w))?;
                for n in 1..=((unit_budget / PI) as usize) {
                    let x = geo.position(n as f64 * PI / rate);
                    let v_end = samples.iter().rev().find(|s| s.0 <= n as f64 * PI / rate).map(|s| s.2).unwrap_or(0.0);
                    let v = x.x2.atan2(x.x1);
                    let v = v + 2.0 * PI * ((v_end - v) / (2.0 * PI)).round();
                    let target = PI * n as f64 * w.xi2.signum();
                    focal = focal.max(x.x3.asinh().abs()).max((v - target).abs());
                }
            }
            let hits = samples
                .iter()
                .filter_map(|&(t, u, v)| {
                    grid.locate(crate::tensor::Point2::new(u, v)).map(|(i, j)| (j * grid.nx + i, w.scale(t)))
                })
                .collect();
            Ok((hits, focal))
        })
        .collect();
    let n = grid.nx * grid.ny;
    let mut preimages: Vec<Option<TangentVector2>> = vec![None; n];
    let mut focal_defect = 0.0f64;
    for ray in rays {
        let (hits, focal) = ray?;
        focal_defect = focal_defect.max(focal);
        for (idx, xi) in hits {
            preimages[idx].get_or_insert(xi);
        }
    }
    let mut disagreements = 0;
    let cells = (0..n)
        .map(|idx| {
            let c = grid.center(idx % grid.nx, idx / grid.nx);
            let exact = universal_cover_reachable(c.x1, c.x2);
            match (preimages[idx].is_some(), exact) {
                (true, true) | (false, false) => {}
                _ => disagreements += 1,
            }
            match (preimages[idx].is_some(), exact) {
                (true, _) => Reach::Reachable,
                (false, false) => Reach::Unreachable,
                (false, true) => Reach::Unknown,
            }
        })
        .collect();
    let map = CoverageMap { base: crate::tensor::Point2::new(0.0, 0.0), grid: *grid, cells, preimages };
    Ok(UniversalCoverCoverage { map, focal_defect, disagreements })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_products() {
        assert_eq!(minkowski_inner(&E1, &E1), 1.0);
        assert_eq!(minkowski_inner(&(E2 + E3), &(E2 + E3)), 0.0);
        assert_eq!(minkowski_inner(&MinkowskiVec3::new(1.0, 2.0, 3.0), &MinkowskiVec3::new(4.0, 5.0, 6.0)), -4.0);
    }

    #[test]
    fn chart_points() {
        assert_eq!(chart_T(0.0, 0.0).vec(), E1);
        let q = chart_T(0.0, FRAC_PI_2).vec();
        assert!((q - E2).euclid() < 1e-16);
        assert_eq!(chart_T(0.7, 1.1 + 2.0 * PI).chart_coords().0, chart_T(0.7, 1.1).chart_coords().0);
    }

    #[test]
    fn closed_form_examples() {
        let p = PseudospherePoint::BASE;
        let q = pseudosphere_geodesic(&p, E2, PI).unwrap().vec();
        assert!((q + E1).euclid() < 1e-15);
        let q = pseudosphere_geodesic(&p, E2, 2.0 * PI).unwrap().vec();
        assert!((q - E1).euclid() < 1e-15);
        let q = pseudosphere_geodesic(&p, E2 + E3, 5.0).unwrap().vec();
        assert_eq!(q, MinkowskiVec3::new(1.0, 5.0, 5.0));
        assert!(matches!(pseudosphere_geodesic(&p, E1 + E2, 1.0), Err(PseudosphereError::NotTangent { .. })));
    }

    #[test]
    fn normalization_rescales_parameter() {
        let p = PseudospherePoint::BASE;
        let a = pseudosphere_geodesic(&p, 3.0 * E2, 0.5).unwrap().vec();
        let b = pseudosphere_geodesic(&p, E2, 1.5).unwrap().vec();
        assert!((a - b).euclid() < 1e-15);
    }

    #[test]
    fn reachability_by_inner_product() {
        let p = PseudospherePoint::BASE;
        let s = 1.0f64;
        let far = PseudospherePoint::new(-s.cosh() * E1 + s.sinh() * E3).unwrap();
        assert!(!pseudosphere_reachable(&p, &far));
        let null_far = PseudospherePoint::new(-E1 + 2.0 * (E2 + E3)).unwrap();
        assert!(!pseudosphere_reachable(&p, &null_far));
        assert!(pseudosphere_reachable(&p, &PseudospherePoint::new(-E1).unwrap()));
        for q in [chart_T(0.3, 2.0), chart_T(2.0, 0.1), chart_T(0.5, -0.2)] {
            let xi = pseudosphere_log(&p, &q).unwrap();
            let r = pseudosphere_geodesic(&p, xi, 1.0).unwrap().vec();
            assert!((r - q.vec()).euclid() < 1e-12, "{q:?}");
        }
    }
}
