//! Sampled image of the exponential map on a grid of target cells.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::tensor::{ChristoffelField, FieldKind, Point2, TangentVector2};

use super::l2::{l2_log, l2_reachable};
use super::{exp_with_jacobian, flow_samples, is_l2, Flow, GeodesicError, IntegratorOptions};

/// Cells of `window = [x1_min, x1_max, x2_min, x2_max]`, `nx × ny`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub window: [f64; 4],
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(window: [f64; 4], nx: usize, ny: usize) -> Result<Self, GeodesicError> {
        let [a, b, c, d] = window;
        if !(a < b && c < d && window.iter().all(|v| v.is_finite()) && nx > 0 && ny > 0) {
            return Err(GeodesicError::InvalidIvp(format!("empty grid window {window:?} ({nx}×{ny})")));
        }
        Ok(Self { window, nx, ny })
    }

    pub fn cell_size(&self) -> (f64, f64) {
        let [a, b, c, d] = self.window;
        ((b - a) / self.nx as f64, (d - c) / self.ny as f64)
    }

    pub fn center(&self, i: usize, j: usize) -> Point2 {
        let (dx, dy) = self.cell_size();
        Point2::new(self.window[0] + (i as f64 + 0.5) * dx, self.window[2] + (j as f64 + 0.5) * dy)
    }

    /// Cell containing `p`, if inside the window.
    pub fn locate(&self, p: Point2) -> Option<(usize, usize)> {
        let (dx, dy) = self.cell_size();
        let fi = (p.x1 - self.window[0]) / dx;
        let fj = (p.x2 - self.window[2]) / dy;
        (fi >= 0.0 && fj >= 0.0 && fi < self.nx as f64 && fj < self.ny as f64).then(|| (fi as usize, fj as usize))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reach {
    Unreachable = 0,
    Reachable = 1,
    Unknown = 2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageOptions {
    pub integrator: IntegratorOptions,
    /// Directions in the ray sweep that seeds the shooting.
    pub angles: usize,
    /// Affine length of each seeding ray (unit coordinate speed).
    pub ray_length: f64,
    pub newton_iterations: usize,
    /// Relative landing tolerance.
    pub newton_tol: f64,
}

impl Default for CoverageOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorOptions::with_tol(1e-10),
            angles: 1024,
            ray_length: 20.0,
            newton_iterations: 40,
            newton_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoverageMap {
    pub base: Point2,
    pub grid: GridSpec,
    /// Row-major, `cells[j * nx + i]` for the cell with center `grid.center(i, j)`.
    pub cells: Vec<Reach>,
    /// Shooting solution for reached cells.
    pub preimages: Vec<Option<TangentVector2>>,
}

impl CoverageMap {
    pub fn get(&self, i: usize, j: usize) -> Reach {
        self.cells[j * self.grid.nx + i]
    }

    pub fn count(&self, r: Reach) -> usize {
        self.cells.iter().filter(|c| **c == r).count()
    }

    /// One row per `x²` level, top (largest `x²`) first; values `0/1/2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in (0..self.grid.ny).rev() {
            let row: Vec<String> = (0..self.grid.nx).map(|i| (self.get(i, j) as u8).to_string()).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Newton iteration on `exp_p(ξ) = target` with the variational derivative.
pub fn shoot(
    field: &ChristoffelField,
    p: Point2,
    target: Point2,
    seed: TangentVector2,
    opts: &CoverageOptions,
) -> Result<Option<TangentVector2>, GeodesicError> {
    let scale = match field.kind() {
        FieldKind::TypeB => target.x1.min(1.0).max(1e-300),
        _ => 1.0,
    } * (1.0 + target.x1.abs().max(target.x2.abs()));
    let tol = opts.newton_tol * scale;
    let mut xi = seed;
    let Some((mut q, mut jac)) = exp_with_jacobian(field, p, xi, &opts.integrator)? else { return Ok(None) };
    for _ in 0..opts.newton_iterations {
        let f = [q.x1 - target.x1, q.x2 - target.x2];
        let err = f[0].abs().max(f[1].abs());
        if err < tol {
            return Ok(Some(xi));
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Ok(None);
        }
        let step = [(-f[0] * jac[1][1] + f[1] * jac[0][1]) / det, (f[0] * jac[1][0] - f[1] * jac[0][0]) / det];
        let mut alpha = 1.0;
        let mut improved = false;
        for _ in 0..12 {
            let cand = TangentVector2::new(xi.xi1 + alpha * step[0], xi.xi2 + alpha * step[1]);
            if let Some((q2, j2)) = exp_with_jacobian(field, p, cand, &opts.integrator)? {
                let e2 = (q2.x1 - target.x1).abs().max((q2.x2 - target.x2).abs());
                if e2 < err {
                    xi = cand;
                    q = q2;
                    jac = j2;
                    improved = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !improved {
            return Ok(None);
        }
    }
    let err = (q.x1 - target.x1).abs().max((q.x2 - target.x2).abs());
    Ok((err < tol).then_some(xi))
}

/// Seeds `ξ` for every cell crossed by a ray `t ↦ exp_p(t(cos θ, sin θ))`.
fn ray_seeds(
    field: &ChristoffelField,
    p: Point2,
    grid: &GridSpec,
    opts: &CoverageOptions,
) -> Result<Vec<Option<(f64, TangentVector2)>>, GeodesicError> {
    let flow = Flow::geodesic(field, opts.integrator.chart_floor);
    let (dx, dy) = grid.cell_size();
    let rays: Vec<Result<Vec<(usize, f64, TangentVector2)>, GeodesicError>> = (0..opts.angles)
        .into_par_iter()
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / opts.angles as f64;
            let dir = [theta.cos(), theta.sin()];
            let (samples, _) = flow_samples(&flow, [p.x1, p.x2, dir[0], dir[1]], opts.ray_length, &opts.integrator)?;
            let mut hits = Vec::new();
            for w in samples.windows(2) {
                let ((ta, ya), (tb, yb)) = (w[0], w[1]);
                let span = ((yb[0] - ya[0]) / dx).abs().max(((yb[1] - ya[1]) / dy).abs());
                let n = (2.0 * span).ceil().clamp(1.0, 1e4) as usize;
                for m in 0..n {
                    let s = m as f64 / n as f64;
                    let x = Point2::new(ya[0] + s * (yb[0] - ya[0]), ya[1] + s * (yb[1] - ya[1]));
                    if let Some((i, j)) = grid.locate(x) {
                        let c = grid.center(i, j);
                        let t = ta + s * (tb - ta);
                        hits.push((j * grid.nx + i, x.dist(c), TangentVector2::new(t * dir[0], t * dir[1])));
                    }
                }
            }
            Ok(hits)
        })
        .collect();
    let mut best: Vec<Option<(f64, TangentVector2)>> = vec![None; grid.nx * grid.ny];
    for ray in rays {
        for (idx, d, xi) in ray? {
            if best[idx].is_none_or(|(bd, _)| d < bd) {
                best[idx] = Some((d, xi));
            }
        }
    }
    Ok(best)
}

/// Which cell centers of `grid` lie in the image of `exp_p`.
///
/// For `L2` the unreachable cells are decided exactly and every other cell is
/// confirmed by shooting from the closed-form preimage. For other charts
/// cells are seeded by a ray sweep; a cell whose shooting fails is
/// `Unknown`, never `Unreachable` (only points outside the chart are).
pub fn exp_coverage(
    field: &ChristoffelField,
    p: Point2,
    grid: &GridSpec,
    opts: &CoverageOptions,
) -> Result<CoverageMap, GeodesicError> {
    field.check_domain(p)?;
    let l2 = is_l2(field);
    let seeds = if l2 { Vec::new() } else { ray_seeds(field, p, grid, opts)? };
    let results: Vec<Result<(Reach, Option<TangentVector2>), GeodesicError>> = (0..grid.nx * grid.ny)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % grid.nx, idx / grid.nx);
            let target = grid.center(i, j);
            if field.check_domain(target).is_err() {
                return Ok((Reach::Unreachable, None));
            }
            let seed = if l2 {
                if !l2_reachable(p, target) {
                    return Ok((Reach::Unreachable, None));
                }
                l2_log(p, target)
            } else {
                seeds[idx].map(|(_, xi)| xi)
            };
            let Some(seed) = seed else { return Ok((Reach::Unknown, None)) };
            Ok(match shoot(field, p, target, seed, opts)? {
                Some(xi) => (Reach::Reachable, Some(xi)),
                None => (Reach::Unknown, None),
            })
        })
        .collect();
    let mut cells = Vec::with_capacity(results.len());
    let mut preimages = Vec::with_capacity(results.len());
    for r in results {
        let (c, xi) = r?;
        cells.push(c);
        preimages.push(xi);
    }
    Ok(CoverageMap { base: p, grid: *grid, cells, preimages })
}
