//! Dormand–Prince 5(4) for autonomous systems, with blowup and chart-exit
//! detection.

use super::{GeodesicError, IntegratorOptions, Status};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// A right-hand side returning `None` outside the chart.
pub(crate) trait System<const N: usize> {
    fn rhs(&self, y: &[f64; N]) -> Option<[f64; N]>;
    /// Absolute error floor at `y`, in units of the state.
    fn scale(&self, y: &[f64; N]) -> f64;
    /// Components counted by the blowup test.
    fn blowup_norm(&self, y: &[f64; N]) -> f64 {
        y.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, ks: &[[f64; N]], coeffs: &[f64]) -> [f64; N] {
    let mut out = *y;
    for (k, &c) in ks.iter().zip(coeffs) {
        if c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

fn finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Aitken extrapolation of the last three accepted times.
fn escape_estimate(ts: &[f64]) -> f64 {
    let n = ts.len();
    let last = ts[n - 1];
    if n < 3 {
        return last;
    }
    let (t0, t1, t2) = (ts[n - 3], ts[n - 2], ts[n - 1]);
    let (d1, d2) = (t1 - t0, t2 - t1);
    let denom = d2 - d1;
    if denom == 0.0 || !denom.is_finite() {
        return last;
    }
    let est = t2 - d2 * d2 / denom;
    // The estimate must lie ahead of the last step, in the direction of travel.
    if est.is_finite() && (est - t2) * d2 >= 0.0 {
        est
    } else {
        last
    }
}

/// Integrate from `t = 0` to `t_end`, calling `observe` on the initial state
/// and after every accepted step.
pub(crate) fn integrate<const N: usize, S: System<N>>(
    sys: &S,
    y0: [f64; N],
    t_end: f64,
    opts: &IntegratorOptions,
    mut observe: impl FnMut(f64, &[f64; N]),
) -> Result<Status, GeodesicError> {
    observe(0.0, &y0);
    if t_end == 0.0 {
        return Ok(Status::ReachedHorizon);
    }
    let dir = t_end.signum();
    let mut t = 0.0f64;
    let mut y = y0;
    let mut k0 = sys.rhs(&y).ok_or(GeodesicError::InvalidIvp("initial point outside the chart".into()))?;
    let tol = opts.tol;
    let err_scale = |y: &[f64; N], yn: &[f64; N], floor: f64, i: usize| tol * (floor.max(y[i].abs()).max(yn[i].abs()));

    // Initial step (Hairer–Nørsett–Wanner heuristic).
    let floor = sys.scale(&y);
    let d0 = (0..N).map(|i| y[i].abs() / (floor.max(y[i].abs()))).fold(0.0, f64::max);
    let d1 = (0..N).map(|i| k0[i].abs() / (floor.max(y[i].abs()))).fold(0.0, f64::max);
    let mut h = if d1 < 1e-12 { 1e-2 } else { 0.01 * d0.max(1e-5) / d1 };
    h = h.min(t_end.abs()).max(opts.min_step);

    let mut accepted_times: Vec<f64> = vec![0.0];
    let mut steps = 0usize;
    loop {
        if steps >= opts.max_steps {
            return Err(GeodesicError::StepBudgetExceeded { t, steps });
        }
        steps += 1;
        let remaining = (t_end - t).abs();
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;

        let mut ks = [[0.0; N]; 7];
        ks[0] = k0;
        let mut ok = true;
        for s in 1..7 {
            let ys = axpy(&y, hs, &ks[..s], &A[s][..s]);
            match sys.rhs(&ys) {
                Some(k) if finite(&k) => ks[s] = k,
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        let mut err_ratio = f64::INFINITY;
        let mut y_new = y;
        if ok {
            y_new = axpy(&y, hs, &ks[..7], &B);
            ok = finite(&y_new);
            if ok {
                let floor = sys.scale(&y).min(sys.scale(&y_new)).max(f64::MIN_POSITIVE);
                err_ratio = 0.0;
                for i in 0..N {
                    let e: f64 = (0..7).map(|s| E[s] * ks[s][i]).sum::<f64>() * hs;
                    err_ratio = err_ratio.max(e.abs() / err_scale(&y, &y_new, floor, i));
                }
            }
        }

        if !ok || !(err_ratio <= 1.0) {
            // Rejected: a failed stage evaluation means the step left the chart.
            let factor = if ok && err_ratio.is_finite() { (0.9 * err_ratio.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= factor;
            if h < opts.min_step.max(t.abs() * 4.0 * f64::EPSILON) {
                let t_escape = escape_estimate(&accepted_times);
                return Ok(if !ok && chart_exit_likely(sys, &y, hs) {
                    Status::LeftChart { t_exit: t }
                } else {
                    Status::Blowup { t_escape, underflow: sys.blowup_norm(&y) <= opts.blowup_norm }
                });
            }
            continue;
        }

        t = if last { t_end } else { t + hs };
        y = y_new;
        k0 = ks[6];
        accepted_times.push(t);
        if accepted_times.len() > 3 {
            accepted_times.remove(0);
        }
        observe(t, &y);
        if last {
            return Ok(Status::ReachedHorizon);
        }
        let factor = if err_ratio == 0.0 { 5.0 } else { (0.9 * err_ratio.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * factor).max(0.0);
        if sys.blowup_norm(&y) > opts.blowup_norm && h < opts.min_step {
            return Ok(Status::Blowup { t_escape: escape_estimate(&accepted_times), underflow: false });
        }
        h = h.max(opts.min_step * 0.5);
    }
}

/// Whether a tiny Euler step from `y` already leaves the chart.
fn chart_exit_likely<const N: usize, S: System<N>>(sys: &S, y: &[f64; N], hs: f64) -> bool {
    let Some(k) = sys.rhs(y) else { return true };
    let probe: [f64; N] = std::array::from_fn(|i| y[i] + hs * k[i]);
    sys.rhs(&probe).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay;
    impl System<1> for Decay {
        fn rhs(&self, y: &[f64; 1]) -> Option<[f64; 1]> {
            Some([-y[0]])
        }
        fn scale(&self, _: &[f64; 1]) -> f64 {
            1.0
        }
    }

    struct Riccati;
    impl System<1> for Riccati {
        fn rhs(&self, y: &[f64; 1]) -> Option<[f64; 1]> {
            Some([y[0] * y[0]])
        }
        fn scale(&self, _: &[f64; 1]) -> f64 {
            1.0
        }
    }

    struct Wall;
    impl System<1> for Wall {
        // x' = -1 on x > 0: leaves the chart at t = 1.
        fn rhs(&self, y: &[f64; 1]) -> Option<[f64; 1]> {
            (y[0] > 0.0).then_some([-1.0])
        }
        fn scale(&self, _: &[f64; 1]) -> f64 {
            1.0
        }
    }

    #[test]
    fn exponential_decay() {
        let mut last = (0.0, [0.0]);
        let st = integrate(&Decay, [1.0], 3.0, &IntegratorOptions::default(), |t, y| last = (t, *y)).unwrap();
        assert_eq!(st, Status::ReachedHorizon);
        assert_eq!(last.0, 3.0);
        assert!((last.1[0] - (-3.0f64).exp()).abs() < 1e-10);
        let st = integrate(&Decay, [1.0], -2.0, &IntegratorOptions::default(), |t, y| last = (t, *y)).unwrap();
        assert_eq!(st, Status::ReachedHorizon);
        assert!((last.1[0] - 2.0f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn riccati_blowup_time() {
        // y' = y², y(0) = 1 escapes at t = 1.
        let st = integrate(&Riccati, [1.0], 5.0, &IntegratorOptions::default(), |_, _| {}).unwrap();
        let Status::Blowup { t_escape, underflow } = st else { panic!("{st:?}") };
        assert!(!underflow);
        assert!((t_escape - 1.0).abs() < 1e-8, "{t_escape}");
    }

    #[test]
    fn wall_exit() {
        let st = integrate(&Wall, [1.0], 5.0, &IntegratorOptions::default(), |_, _| {}).unwrap();
        let Status::LeftChart { t_exit } = st else { panic!("{st:?}") };
        assert!((t_exit - 1.0).abs() < 1e-9, "{t_exit}");
    }
}
