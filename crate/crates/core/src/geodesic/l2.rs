//! Closed-form geodesics of `L2` and the exact description of the image of
//! its exponential map.
//!
//! Every geodesic is, up to an affine change of parameter, one of
//!
//! 1. `(e^t, α)` on `ℝ`,
//! 2. `(1/t, ±1/t + α)` on `(0, ∞)`,
//! 3. `(1/(c sinh t), ±coth(t)/c + β)` on `(0, ∞)`,
//! 4. `(1/(c sin t), ±cot(t)/c + β)` on `(0, π)`,
//!
//! with `c > 0`.

use crate::tensor::{Point2, TangentVector2};

use super::GeodesicError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum L2Family {
    /// 1: `(e^t, α)`, timelike, complete.
    Horizontal { alpha: f64 },
    /// 2: `(1/t, s/t + α)`, null.
    Null { sign: f64, alpha: f64 },
    /// 3: `(1/(c sinh t), s·coth(t)/c + β)`, timelike.
    Timelike { sign: f64, c: f64, beta: f64 },
    /// 4: `(1/(c sin t), s·cot(t)/c + β)`, spacelike.
    Spacelike { sign: f64, c: f64, beta: f64 },
}

fn sign_param(s: f64) -> Result<f64, GeodesicError> {
    if s == 1.0 || s == -1.0 {
        Ok(s)
    } else {
        Err(GeodesicError::ParamOutOfDomain(format!("sign must be ±1, got {s}")))
    }
}

/// Family `1..=4` with parameters `[α]`, `[±1, α]`, `[±1, c, β]`, `[±1, c, β]`.
pub fn l2_closed_form(family: u8, params: &[f64]) -> Result<L2Family, GeodesicError> {
    let want = match family {
        1 => 1,
        2 => 2,
        3 | 4 => 3,
        _ => return Err(GeodesicError::ParamOutOfDomain(format!("family {family} (expected 1..=4)"))),
    };
    if params.len() != want || params.iter().any(|p| !p.is_finite()) {
        return Err(GeodesicError::ParamOutOfDomain(format!("family {family} takes {want} finite parameters")));
    }
    Ok(match family {
        1 => L2Family::Horizontal { alpha: params[0] },
        2 => L2Family::Null { sign: sign_param(params[0])?, alpha: params[1] },
        _ => {
            let (sign, c, beta) = (sign_param(params[0])?, params[1], params[2]);
            if c <= 0.0 {
                return Err(GeodesicError::ParamOutOfDomain(format!("c must be positive, got {c}")));
            }
            if family == 3 {
                L2Family::Timelike { sign, c, beta }
            } else {
                L2Family::Spacelike { sign, c, beta }
            }
        }
    })
}

impl L2Family {
    pub fn index(&self) -> u8 {
        match self {
            Self::Horizontal { .. } => 1,
            Self::Null { .. } => 2,
            Self::Timelike { .. } => 3,
            Self::Spacelike { .. } => 4,
        }
    }

    /// Open parameter interval of the maximal geodesic.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::Horizontal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Null { .. } | Self::Timelike { .. } => (0.0, f64::INFINITY),
            Self::Spacelike { .. } => (0.0, std::f64::consts::PI),
        }
    }

    /// Position and velocity at parameter `t`.
    pub fn eval(&self, t: f64) -> Result<(Point2, TangentVector2), GeodesicError> {
        let (lo, hi) = self.domain();
        if !(t > lo && t < hi) {
            return Err(GeodesicError::ParamOutOfDomain(format!("t = {t} outside ({lo}, {hi})")));
        }
        Ok(match *self {
            Self::Horizontal { alpha } => (Point2::new(t.exp(), alpha), TangentVector2::new(t.exp(), 0.0)),
            Self::Null { sign, alpha } => {
                let inv = 1.0 / t;
                (Point2::new(inv, sign * inv + alpha), TangentVector2::new(-inv * inv, -sign * inv * inv))
            }
            Self::Timelike { sign, c, beta } => {
                let (sh, ch) = (t.sinh(), t.cosh());
                (
                    Point2::new(1.0 / (c * sh), sign * ch / sh / c + beta),
                    TangentVector2::new(-ch / (c * sh * sh), -sign / (c * sh * sh)),
                )
            }
            Self::Spacelike { sign, c, beta } => {
                let (sn, cs) = (t.sin(), t.cos());
                (
                    Point2::new(1.0 / (c * sn), sign * cs / sn / c + beta),
                    TangentVector2::new(-cs / (c * sn * sn), -sign / (c * sn * sn)),
                )
            }
        })
    }
}

/// An affinely reparametrized family member: `γ(t) = σ(τ₀ + k t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedGeodesic {
    pub family: L2Family,
    pub tau0: f64,
    pub k: f64,
}

impl MatchedGeodesic {
    /// The unique closed-form geodesic with `γ(0) = p`, `γ̇(0) = v`.
    pub fn through(p: Point2, v: TangentVector2) -> Result<Self, GeodesicError> {
        if !(p.x1 > 0.0) || v.norm() == 0.0 {
            return Err(GeodesicError::ParamOutOfDomain("need x¹ > 0 and a nonzero velocity".into()));
        }
        let (x1, x2, v1, v2) = (p.x1, p.x2, v.xi1, v.xi2);
        if v2 == 0.0 {
            return Ok(Self { family: L2Family::Horizontal { alpha: x2 }, tau0: x1.ln(), k: v1 / x1 });
        }
        let x1sq = x1 * x1;
        let c_fit = v2 / x1sq;
        let lambda = (v2 * v2 - v1 * v1) / x1sq;
        let rel = lambda.abs() * x1sq / (v1 * v1 + v2 * v2);
        if rel < 1e-14 {
            // Null: σ(τ) = (1/τ, s/τ + α), τ₀ = 1/x¹, k = −v¹/(x¹)².
            let k = -v1 / x1sq;
            let sign = (v2 / v1).signum();
            return Ok(Self { family: L2Family::Null { sign, alpha: x2 - sign * x1 }, tau0: 1.0 / x1, k });
        }
        if lambda < 0.0 {
            let k = -v1.signum() * (-lambda).sqrt();
            let c_sigma = c_fit / k;
            let (c, sign) = (c_sigma.abs(), -c_sigma.signum());
            let tau0 = (1.0 / (c * x1)).asinh();
            let beta = x2 - sign * tau0.cosh() / tau0.sinh() / c;
            Ok(Self { family: L2Family::Timelike { sign, c, beta }, tau0, k })
        } else {
            let k = lambda.sqrt();
            let c_sigma = c_fit / k;
            let (c, sign) = (c_sigma.abs(), -c_sigma.signum());
            // sin τ₀ = 1/(c x¹) and cos τ₀ = −v¹ c sin²τ₀ / k.
            let sn = (1.0 / (c * x1)).min(1.0);
            let cs = -v1 * c * sn * sn / k;
            let tau0 = sn.atan2(cs);
            let beta = x2 - sign * tau0.cos() / tau0.sin() / c;
            Ok(Self { family: L2Family::Spacelike { sign, c, beta }, tau0, k })
        }
    }

    pub fn eval(&self, t: f64) -> Result<(Point2, TangentVector2), GeodesicError> {
        let (p, v) = self.family.eval(self.tau0 + self.k * t)?;
        Ok((p, v.scale(self.k)))
    }

    /// Interval of `t` on which the geodesic exists.
    pub fn t_domain(&self) -> (f64, f64) {
        let (lo, hi) = self.family.domain();
        let (a, b) = ((lo - self.tau0) / self.k, (hi - self.tau0) / self.k);
        if a < b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// Whether `target` lies in the image of `exp_p` for `L2`.
///
/// The map `x ↦ (x¹/p¹, (x² − p²)/p¹)` is an affine automorphism taking `p`
/// to `(1, 0)`. There, a target `(a, b)` with `b ≠ 0` lies on the unique
/// geodesic hyperbola `(x¹)² − λ/c² = (x² + β)²` with `β = (a² − 1 − b²)/(2b)`.
/// When `β² < 1` that is a full spacelike branch; otherwise a timelike or
/// null geodesic covers only the half on which `x² + β` keeps the sign it
/// has at `(1, 0)`.
pub fn l2_reachable(p: Point2, target: Point2) -> bool {
    let (a, b) = (target.x1 / p.x1, (target.x2 - p.x2) / p.x1);
    if !(a > 0.0) {
        return false;
    }
    if b == 0.0 {
        return true;
    }
    let beta = (a * a - 1.0 - b * b) / (2.0 * b);
    beta * beta < 1.0 || (b + beta) * beta > 0.0
}

/// `exp_p⁻¹(target)` for `L2`, when the target is reachable.
pub fn l2_log(p: Point2, target: Point2) -> Option<TangentVector2> {
    if !l2_reachable(p, target) {
        return None;
    }
    let (a, b) = (target.x1 / p.x1, (target.x2 - p.x2) / p.x1);
    let xi = log_from_base(a, b)?;
    Some(xi.scale(p.x1))
}

/// Log map at `(1, 0)`: `ξ = (τ₁ − τ₀) σ'(τ₀)` on the family through both points.
fn log_from_base(a: f64, b: f64) -> Option<TangentVector2> {
    if b == 0.0 {
        return Some(TangentVector2::new(a.ln(), 0.0));
    }
    if a == 1.0 && b == 0.0 {
        return Some(TangentVector2::new(0.0, 0.0));
    }
    let beta = (a * a - 1.0 - b * b) / (2.0 * b);
    let disc = 1.0 - beta * beta;
    let (family, tau0, tau1) = if disc.abs() < 1e-14 {
        // Null: x¹ = s(x² + β) with s = β.
        let sign = beta.signum();
        (L2Family::Null { sign, alpha: -beta }, 1.0, 1.0 / a)
    } else if disc > 0.0 {
        let c = 1.0 / disc.sqrt();
        let fam = L2Family::Spacelike { sign: 1.0, c, beta: -beta };
        // sin τ = 1/(c x¹), cos τ = c (x² + β) sin τ.
        let tau = |x1: f64, x2: f64| {
            let sn = 1.0 / (c * x1);
            sn.atan2(c * (x2 + beta) * sn)
        };
        (fam, tau(1.0, 0.0), tau(a, b))
    } else {
        let c = 1.0 / (-disc).sqrt();
        let sign = beta.signum();
        let fam = L2Family::Timelike { sign, c, beta: -beta };
        let tau = |x1: f64| (1.0 / (c * x1)).asinh();
        (fam, tau(1.0), tau(a))
    };
    let (_, v) = family.eval(tau0).ok()?;
    Some(v.scale(tau1 - tau0))
}
