//! Jacobi fields and conjugate points.
//!
//! A Jacobi field is the variation `(δx, δv)` of the geodesic flow; it is
//! integrated together with the geodesic and a parallel frame, so no
//! interpolation of the base trajectory is needed.

use crate::tensor::{Point2, TangentVector2};

use super::{
    flow_samples, flow_to, variation_velocity, Flow, GeodesicError, GeodesicTrajectory, IntegratorOptions, Status,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiSample {
    pub t: f64,
    pub p: Point2,
    pub v: TangentVector2,
    /// Parallel frame `(e₁, e₂)`.
    pub frame: [TangentVector2; 2],
    /// `Y` in coordinates.
    pub y: TangentVector2,
    /// Components `(a₁, a₂)` of `Y` in the frame.
    pub a: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct JacobiField {
    pub samples: Vec<JacobiSample>,
    pub status_forward: Status,
    pub status_backward: Status,
}

impl JacobiField {
    /// `t,a1,a2` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,a1,a2\n");
        for s in &self.samples {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e}\n", s.t, s.a[0], s.a[1]));
        }
        out
    }
}

/// Smallest `|sin ∠(Y₁, Y₂)|` at which the orientation of the pair is trusted.
const RESOLVED: f64 = 1e-7;

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// The Jacobi field along `traj` with `Y(0) = y0` and `∇_σ̇ Y(0) = ydot0`,
/// expressed in the parallel frame that starts at `frame0`.
pub fn integrate_jacobi(
    traj: &GeodesicTrajectory,
    y0: TangentVector2,
    ydot0: TangentVector2,
    frame0: [TangentVector2; 2],
    opts: &IntegratorOptions,
) -> Result<JacobiField, GeodesicError> {
    let ivp = &traj.ivp;
    let (e1, e2) = (frame0[0].coords(), frame0[1].coords());
    let scale = frame0[0].norm() * frame0[1].norm();
    if !(cross(e1, e2).abs() > 1e-12 * scale) {
        return Err(GeodesicError::FrameDegenerate { t: 0.0 });
    }
    let v0 = ivp.v0.coords();
    let dv0 = variation_velocity(&ivp.field, ivp.p0, v0, y0.coords(), ydot0.coords());
    let state0 = [ivp.p0.x1, ivp.p0.x2, v0[0], v0[1], e1[0], e1[1], e2[0], e2[1], y0.xi1, y0.xi2, dv0[0], dv0[1]];
    let flow = Flow { field: &ivp.field, chart_floor: opts.chart_floor, frame: true, cols: 1 };

    let to_sample = |t: f64, y: &[f64; 12]| -> Result<JacobiSample, GeodesicError> {
        let (f1, f2) = ([y[4], y[5]], [y[6], y[7]]);
        let det = cross(f1, f2);
        let norm = (f1[0].hypot(f1[1])) * (f2[0].hypot(f2[1]));
        if !(det.abs() > 1e-12 * norm) {
            return Err(GeodesicError::FrameDegenerate { t });
        }
        let yy = [y[8], y[9]];
        let a = [cross(yy, f2) / det, cross(f1, yy) / det];
        Ok(JacobiSample {
            t,
            p: Point2::new(y[0], y[1]),
            v: TangentVector2::new(y[2], y[3]),
            frame: [TangentVector2::from_coords(f1), TangentVector2::from_coords(f2)],
            y: TangentVector2::from_coords(yy),
            a,
        })
    };

    let (back, status_backward) = flow_samples(&flow, state0, ivp.t_span.0, opts)?;
    let (fwd, status_forward) = flow_samples(&flow, state0, ivp.t_span.1, opts)?;
    let mut samples = Vec::with_capacity(back.len() + fwd.len());
    for (t, y) in back.iter().skip(1).rev().chain(fwd.iter()) {
        samples.push(to_sample(*t, y)?);
    }
    Ok(JacobiField { samples, status_forward, status_backward })
}

/// Parameters `t ≠ 0` in the trajectory's range where a nontrivial Jacobi
/// field with `Y(0) = 0` vanishes, i.e. zeros of `det(Y₁, Y₂)` for the fields
/// with `∇_σ̇ Y_i(0) = e_i`.
pub fn conjugate_points(traj: &GeodesicTrajectory, opts: &IntegratorOptions) -> Result<Vec<f64>, GeodesicError> {
    let ivp = &traj.ivp;
    let v0 = ivp.v0.coords();
    let state0 = [ivp.p0.x1, ivp.p0.x2, v0[0], v0[1], 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
    let flow = Flow { field: &ivp.field, chart_floor: opts.chart_floor, frame: false, cols: 2 };
    let det = |y: &[f64; 12]| cross([y[4], y[5]], [y[8], y[9]]);

    let refine = |mut lo: f64, mut dlo: f64, mut hi: f64| -> Result<f64, GeodesicError> {
        while (hi - lo).abs() > 1e-13 * hi.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            let Ok(y) = flow_to(&flow, state0, mid, opts)? else { break };
            let dm = det(&y);
            if dm.signum() == dlo.signum() {
                lo = mid;
                dlo = dm;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };

    let mut out = Vec::new();
    for t_end in [ivp.t_span.0, ivp.t_span.1] {
        if t_end == 0.0 {
            continue;
        }
        let (samples, _) = flow_samples(&flow, state0, t_end, opts)?;
        // det ≈ t² near 0, so the sign is taken from the first step on. A
        // sign only counts once the fields are resolvably non-parallel; near
        // a blowup both fields align with the escape direction and the raw
        // sign of det is noise.
        let mut last: Option<(f64, f64)> = None;
        for (t, y) in samples.iter().skip(1) {
            let d = det(y);
            if !(d.abs() > RESOLVED * y[4].hypot(y[5]) * y[8].hypot(y[9])) {
                continue;
            }
            if let Some((ta, da)) = last {
                if da.signum() != d.signum() {
                    out.push(refine(ta, da, *t)?);
                }
            }
            last = Some((*t, d));
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}
