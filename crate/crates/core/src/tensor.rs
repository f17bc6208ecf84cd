//! Connection charts on surfaces and their curvature invariants.
//!
//! A chart stores only the six lower-symmetric Christoffel symbols
//! `Γ_{11}^1, Γ_{11}^2, Γ_{12}^1, Γ_{12}^2, Γ_{22}^1, Γ_{22}^2` (in that order),
//! so torsion-freeness is structural. Type A charts have constant symbols,
//! Type B charts have `Γ = C / x¹` on the half plane `x¹ > 0`, and analytic
//! charts carry hand-written closures for the symbols and their first
//! derivatives.
//!
//! Index conventions used throughout:
//!
//! * `gamma[i][j][k] = Γ_{ij}^k`
//! * `R[i][j][k][l] = R_{ijk}^l`, the `∂_l` component of `R(∂_i, ∂_j)∂_k`
//! * `ρ[j][k] = Σ_i R_{ijk}^i`, i.e. `ρ(x, y) = Tr(z ↦ R(z, x)y)`
//! * `∇ρ[k][i][j] = (∇_{∂_k} ρ)(∂_i, ∂_j)`; the first slot is the
//!   differentiation direction.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary precision rational used for exact coefficient tables.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("point ({x1}, {x2}) lies outside the chart (Type B charts need x1 > 0)")]
    Domain { x1: f64, x2: f64 },
    #[error("cannot parse rational coefficient `{0}`")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn coords(self) -> [f64; 2] {
        [self.x1, self.x2]
    }

    pub fn from_coords(c: [f64; 2]) -> Self {
        Self { x1: c[0], x2: c[1] }
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentVector2 {
    pub xi1: f64,
    pub xi2: f64,
}

impl TangentVector2 {
    pub const fn new(xi1: f64, xi2: f64) -> Self {
        Self { xi1, xi2 }
    }

    pub fn coords(self) -> [f64; 2] {
        [self.xi1, self.xi2]
    }

    pub fn from_coords(c: [f64; 2]) -> Self {
        Self { xi1: c[0], xi2: c[1] }
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.xi1 * s, self.xi2 * s)
    }

    pub fn norm(self) -> f64 {
        self.xi1.hypot(self.xi2)
    }
}

/// Ring operations needed by the curvature formulas. Implemented for `f64`
/// and for [`Rational`], so one code path serves exact tables and point
/// evaluation.
pub trait Scalar:
    Clone + Zero + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<T> Scalar for T where T: Clone + Zero + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T> {}

/// `Γ_{ij}^k` stored as `gamma[i][j][k]`.
pub type Gamma<T> = [[[T; 2]; 2]; 2];

fn zeros3<T: Scalar>() -> [[[T; 2]; 2]; 2] {
    std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| T::zero())))
}

fn zeros2<T: Scalar>() -> [[T; 2]; 2] {
    std::array::from_fn(|_| std::array::from_fn(|_| T::zero()))
}

/// Position of `Γ_{ij}^k` in the six-slot storage order.
pub fn slot(i: usize, j: usize, k: usize) -> usize {
    let pair = match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (0, 1) => 1,
        _ => 2,
    };
    2 * pair + k
}

/// Expand six stored symbols into the symmetric `Γ_{ij}^k` array.
pub fn expand<T: Scalar>(six: &[T; 6]) -> Gamma<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| six[slot(i, j, k)].clone())))
}

/// Curvature components `R_{ijk}^l`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureComponents<T> {
    pub c: [[[[T; 2]; 2]; 2]; 2],
}

/// A `(0,2)` tensor such as `ρ` or `ρ_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor02<T> {
    pub c: [[T; 2]; 2],
}

/// A `(0,3)` tensor; used for `∇ρ` with `c[k][i][j] = (∇_k ρ)_{ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor03<T> {
    pub c: [[[T; 2]; 2]; 2],
}

/// An exact coefficient table representing `table · (x¹)^(−power)`.
/// `power` is 0 for Type A charts.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaled<T> {
    pub table: T,
    pub power: i32,
}

impl<T: Scalar> Tensor02<T> {
    pub fn zero() -> Self {
        Self { c: zeros2() }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().flatten().all(Zero::is_zero)
    }
}

impl Tensor02<Rational> {
    pub fn symmetrized(&self) -> Self {
        let half = Rational::new(1.into(), 2.into());
        Self {
            c: std::array::from_fn(|i| {
                std::array::from_fn(|j| (self.c[i][j].clone() + self.c[j][i].clone()) * half.clone())
            }),
        }
    }
}

impl<T: Scalar> Tensor03<T> {
    pub fn is_zero(&self) -> bool {
        self.c.iter().flatten().flatten().all(Zero::is_zero)
    }
}

impl<T: Scalar> CurvatureComponents<T> {
    pub fn is_zero(&self) -> bool {
        self.c.iter().flatten().flatten().flatten().all(Zero::is_zero)
    }
}

impl Tensor02<f64> {
    pub fn max_abs(&self) -> f64 {
        self.c.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.c.iter().flatten().zip(other.c.iter().flatten()).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn rank(&self, tol: f64) -> usize {
        let det = self.c[0][0] * self.c[1][1] - self.c[0][1] * self.c[1][0];
        if self.max_abs() <= tol {
            0
        } else if det.abs() <= tol * self.max_abs().max(1.0) {
            1
        } else {
            2
        }
    }
}

impl Tensor03<f64> {
    pub fn max_abs(&self) -> f64 {
        self.c.iter().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.c
            .iter()
            .flatten()
            .flatten()
            .zip(other.c.iter().flatten().flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl CurvatureComponents<f64> {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.c
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .zip(other.c.iter().flatten().flatten().flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Coordinate curvature formula
/// `R_{ijk}^l = ∂_i Γ_{jk}^l − ∂_j Γ_{ik}^l + Γ_{is}^l Γ_{jk}^s − Γ_{js}^l Γ_{ik}^s`.
/// `dgamma[m]` holds `∂_m Γ`.
pub fn curvature_from<T: Scalar>(gamma: &Gamma<T>, dgamma: &[Gamma<T>; 2]) -> CurvatureComponents<T> {
    let c = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                std::array::from_fn(|l| {
                    let mut v = dgamma[i][j][k][l].clone() - dgamma[j][i][k][l].clone();
                    for s in 0..2 {
                        v = v + gamma[i][s][l].clone() * gamma[j][k][s].clone()
                            - gamma[j][s][l].clone() * gamma[i][k][s].clone();
                    }
                    v
                })
            })
        })
    });
    CurvatureComponents { c }
}

/// `ρ_{jk} = Σ_i R_{ijk}^i`.
pub fn ricci_from<T: Scalar>(r: &CurvatureComponents<T>) -> Tensor02<T> {
    Tensor02 { c: std::array::from_fn(|j| std::array::from_fn(|k| r.c[0][j][k][0].clone() + r.c[1][j][k][1].clone())) }
}

/// `(∇_k ρ)_{ij} = ∂_k ρ_{ij} − Γ_{ki}^s ρ_{sj} − Γ_{kj}^s ρ_{is}`; `drho[k]` is `∂_k ρ`.
pub fn nabla_from<T: Scalar>(gamma: &Gamma<T>, rho: &Tensor02<T>, drho: &[Tensor02<T>; 2]) -> Tensor03<T> {
    let c = std::array::from_fn(|k| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut v = drho[k].c[i][j].clone();
                for s in 0..2 {
                    v = v - gamma[k][i][s].clone() * rho.c[s][j].clone() - gamma[k][j][s].clone() * rho.c[i][s].clone();
                }
                v
            })
        })
    });
    Tensor03 { c }
}

/// `∂_m ρ_{jk}` from `Γ`, `∂Γ` and `∂∂Γ` via the product rule on the
/// curvature formula. `ddgamma[m][i]` is `∂_m ∂_i Γ`.
fn ricci_derivative_from(
    gamma: &Gamma<f64>,
    dgamma: &[Gamma<f64>; 2],
    ddgamma: &[[Gamma<f64>; 2]; 2],
) -> [Tensor02<f64>; 2] {
    std::array::from_fn(|m| {
        let mut out = [[0.0; 2]; 2];
        for (j, row) in out.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for i in 0..2 {
                    acc += ddgamma[m][i][j][k][i] - ddgamma[m][j][i][k][i];
                    for s in 0..2 {
                        acc += dgamma[m][i][s][i] * gamma[j][k][s] + gamma[i][s][i] * dgamma[m][j][k][s]
                            - dgamma[m][j][s][i] * gamma[i][k][s]
                            - gamma[j][s][i] * dgamma[m][i][k][s];
                    }
                }
                *v = acc;
            }
        }
        Tensor02 { c: out }
    })
}

/// Six exact Christoffel constants with a cached floating point copy.
#[derive(Clone, PartialEq)]
pub struct Coefficients {
    exact: [Rational; 6],
    approx: [f64; 6],
}

impl Coefficients {
    pub fn new(exact: [Rational; 6]) -> Self {
        let approx = std::array::from_fn(|i| exact[i].to_f64().unwrap_or(f64::NAN));
        Self { exact, approx }
    }

    /// Build from `(numerator, denominator)` pairs.
    pub fn from_ratios(r: [(i64, i64); 6]) -> Self {
        Self::new(r.map(|(n, d)| Rational::new(n.into(), d.into())))
    }

    pub fn from_ints(v: [i64; 6]) -> Self {
        Self::new(v.map(|n| Rational::from_integer(n.into())))
    }

    pub fn zero() -> Self {
        Self::from_ints([0; 6])
    }

    /// Parse six rationals written as integers or `p/q`.
    pub fn parse<S: AsRef<str>>(items: &[S]) -> Result<Self, TensorError> {
        if items.len() != 6 {
            return Err(TensorError::Parse(format!("expected 6 coefficients, got {}", items.len())));
        }
        let mut out: [Rational; 6] = std::array::from_fn(|_| Rational::zero());
        for (slot, s) in out.iter_mut().zip(items) {
            *slot = parse_rational(s.as_ref())?;
        }
        Ok(Self::new(out))
    }

    pub fn exact(&self) -> &[Rational; 6] {
        &self.exact
    }

    pub fn approx(&self) -> &[f64; 6] {
        &self.approx
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.exact[slot(i, j, k)]
    }

    pub fn is_zero(&self) -> bool {
        self.exact.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (n, v) in self.exact.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("]")
    }
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 6] = ["C11^1", "C11^2", "C12^1", "C12^2", "C22^1", "C22^2"];
        for (n, (name, v)) in NAMES.iter().zip(&self.exact).enumerate() {
            if n > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{name}={v}")?;
        }
        Ok(())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational, TensorError> {
    let t = s.trim();
    Rational::from_str(t).map_err(|_| TensorError::Parse(t.to_string()))
}

pub type SixFn = dyn Fn(Point2) -> [f64; 6] + Send + Sync;
pub type SixGradFn = dyn Fn(Point2) -> [[f64; 6]; 2] + Send + Sync;

/// A chart whose symbols are smooth functions, given together with their
/// first partial derivatives (`grad(p)[m]` is `∂_m` of the six symbols).
#[derive(Clone)]
pub struct AnalyticField {
    pub name: String,
    symbols: Arc<SixFn>,
    gradient: Arc<SixGradFn>,
    /// `[x1_min, x1_max, x2_min, x2_max]` sampled by the numerical decisions.
    pub sample_window: [f64; 4],
}

impl AnalyticField {
    pub fn new<F, G>(name: impl Into<String>, symbols: F, gradient: G, sample_window: [f64; 4]) -> Self
    where
        F: Fn(Point2) -> [f64; 6] + Send + Sync + 'static,
        G: Fn(Point2) -> [[f64; 6]; 2] + Send + Sync + 'static,
    {
        Self { name: name.into(), symbols: Arc::new(symbols), gradient: Arc::new(gradient), sample_window }
    }

    pub fn symbols(&self, p: Point2) -> [f64; 6] {
        (self.symbols)(p)
    }

    pub fn gradient(&self, p: Point2) -> [[f64; 6]; 2] {
        (self.gradient)(p)
    }
}

impl fmt::Debug for AnalyticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticField").field("name", &self.name).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    TypeA,
    TypeB,
    Analytic,
}

/// A torsion-free connection chart on a surface.
#[derive(Debug, Clone)]
pub enum ChristoffelField {
    TypeA(Coefficients),
    TypeB(Coefficients),
    Analytic(AnalyticField),
}

const FD_STEP: f64 = 1e-3;

impl ChristoffelField {
    pub fn kind(&self) -> FieldKind {
        match self {
            Self::TypeA(_) => FieldKind::TypeA,
            Self::TypeB(_) => FieldKind::TypeB,
            Self::Analytic(_) => FieldKind::Analytic,
        }
    }

    pub fn coefficients(&self) -> Option<&Coefficients> {
        match self {
            Self::TypeA(c) | Self::TypeB(c) => Some(c),
            Self::Analytic(_) => None,
        }
    }

    pub fn check_domain(&self, p: Point2) -> Result<(), TensorError> {
        let ok = p.x1.is_finite() && p.x2.is_finite() && (!matches!(self, Self::TypeB(_)) || p.x1 > 0.0);
        if ok {
            Ok(())
        } else {
            Err(TensorError::Domain { x1: p.x1, x2: p.x2 })
        }
    }

    /// The six symbols at `p` without the domain check; used in the
    /// integrator's inner loop.
    pub(crate) fn six_unchecked(&self, p: Point2) -> [f64; 6] {
        match self {
            Self::TypeA(c) => *c.approx(),
            Self::TypeB(c) => c.approx().map(|v| v / p.x1),
            Self::Analytic(a) => a.symbols(p),
        }
    }

    pub(crate) fn six_gradient_unchecked(&self, p: Point2) -> [[f64; 6]; 2] {
        match self {
            Self::TypeA(_) => [[0.0; 6]; 2],
            Self::TypeB(c) => {
                let inv2 = 1.0 / (p.x1 * p.x1);
                [c.approx().map(|v| -v * inv2), [0.0; 6]]
            }
            Self::Analytic(a) => a.gradient(p),
        }
    }

    pub fn christoffel_at(&self, p: Point2) -> Result<Gamma<f64>, TensorError> {
        self.check_domain(p)?;
        Ok(expand(&self.six_unchecked(p)))
    }

    /// `[∂_1 Γ, ∂_2 Γ]` at `p`.
    pub fn christoffel_gradient_at(&self, p: Point2) -> Result<[Gamma<f64>; 2], TensorError> {
        self.check_domain(p)?;
        let g = self.six_gradient_unchecked(p);
        Ok([expand(&g[0]), expand(&g[1])])
    }

    pub fn curvature_at(&self, p: Point2) -> Result<CurvatureComponents<f64>, TensorError> {
        let gamma = self.christoffel_at(p)?;
        let dgamma = self.christoffel_gradient_at(p)?;
        Ok(curvature_from(&gamma, &dgamma))
    }

    pub fn ricci_at(&self, p: Point2) -> Result<Tensor02<f64>, TensorError> {
        Ok(ricci_from(&self.curvature_at(p)?))
    }

    pub fn ricci_symmetric_at(&self, p: Point2) -> Result<Tensor02<f64>, TensorError> {
        let r = self.ricci_at(p)?;
        Ok(Tensor02 { c: std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (r.c[i][j] + r.c[j][i]))) })
    }

    /// `∇ρ` at `p`. Type A/B use closed-form second derivatives of `Γ`;
    /// analytic charts differentiate `ρ` with a fourth-order central
    /// difference (step `1e-3`).
    pub fn nabla_ricci_at(&self, p: Point2) -> Result<Tensor03<f64>, TensorError> {
        let gamma = self.christoffel_at(p)?;
        let rho = self.ricci_at(p)?;
        let drho = match self {
            Self::TypeA(_) => [Tensor02::zero(), Tensor02::zero()],
            Self::TypeB(c) => {
                let x = p.x1;
                let d1 = expand(&c.approx().map(|v| -v / (x * x)));
                let dd11 = expand(&c.approx().map(|v| 2.0 * v / (x * x * x)));
                let z = zeros3::<f64>();
                let dgamma = [d1, z];
                let ddgamma = [[dd11, z], [z, z]];
                ricci_derivative_from(&gamma, &dgamma, &ddgamma)
            }
            Self::Analytic(_) => {
                let mut out = [Tensor02::zero(), Tensor02::zero()];
                for (m, d) in out.iter_mut().enumerate() {
                    let shift = |k: f64| {
                        let mut q = p;
                        if m == 0 {
                            q.x1 += k * FD_STEP;
                        } else {
                            q.x2 += k * FD_STEP;
                        }
                        self.ricci_at(q)
                    };
                    let (m2, m1, p1, p2) = (shift(-2.0)?, shift(-1.0)?, shift(1.0)?, shift(2.0)?);
                    for i in 0..2 {
                        for j in 0..2 {
                            d.c[i][j] =
                                (m2.c[i][j] - 8.0 * m1.c[i][j] + 8.0 * p1.c[i][j] - p2.c[i][j]) / (12.0 * FD_STEP);
                        }
                    }
                }
                out
            }
        };
        Ok(nabla_from(&gamma, &rho, &drho))
    }

    fn exact_parts(&self) -> Option<(Gamma<Rational>, [Gamma<Rational>; 2], i32)> {
        match self {
            Self::TypeA(c) => Some((expand(c.exact()), [zeros3(), zeros3()], 0)),
            Self::TypeB(c) => {
                let g = expand(c.exact());
                let d1 = expand(&c.exact().clone().map(|v| -v));
                Some((g, [d1, zeros3()], 2))
            }
            Self::Analytic(_) => None,
        }
    }

    /// Exact `R` as a coefficient table (`power` 0 for Type A, 2 for Type B).
    pub fn curvature_table(&self) -> Option<Scaled<CurvatureComponents<Rational>>> {
        let (g, dg, power) = self.exact_parts()?;
        Some(Scaled { table: curvature_from(&g, &dg), power })
    }

    /// Exact `ρ = (x¹)^(−power) ρ̃`.
    pub fn ricci_table(&self) -> Option<Scaled<Tensor02<Rational>>> {
        let r = self.curvature_table()?;
        Some(Scaled { table: ricci_from(&r.table), power: r.power })
    }

    pub fn ricci_symmetric_table(&self) -> Option<Scaled<Tensor02<Rational>>> {
        let r = self.ricci_table()?;
        Some(Scaled { table: r.table.symmetrized(), power: r.power })
    }

    /// Exact `∇ρ` table (`power` 0 for Type A, 3 for Type B).
    pub fn nabla_ricci_table(&self) -> Option<Scaled<Tensor03<Rational>>> {
        let (g, _, power) = self.exact_parts()?;
        let rho = self.ricci_table()?.table;
        let drho = if power == 0 {
            [Tensor02::zero(), Tensor02::zero()]
        } else {
            let two_rho = Tensor02 {
                c: std::array::from_fn(|i| std::array::from_fn(|j| -(rho.c[i][j].clone() + rho.c[i][j].clone()))),
            };
            [two_rho, Tensor02::zero()]
        };
        let power = if power == 0 { 0 } else { 3 };
        Some(Scaled { table: nabla_from(&g, &rho, &drho), power })
    }

    /// `∇ρ = 0`. Exact for Type A/B; analytic charts are sampled on a 9×9
    /// grid over their window with tolerance `1e-9 · (1 + |ρ|)`.
    pub fn is_locally_symmetric(&self) -> bool {
        match self.nabla_ricci_table() {
            Some(t) => t.table.is_zero(),
            None => self.sample_grid().all(|p| match (self.nabla_ricci_at(p), self.ricci_at(p)) {
                (Ok(n), Ok(r)) => n.max_abs() <= ANALYTIC_TOL * (1.0 + r.max_abs()),
                _ => false,
            }),
        }
    }

    /// `ρ = 0`, decided like [`is_locally_symmetric`](Self::is_locally_symmetric).
    pub fn is_flat(&self) -> bool {
        match self.ricci_table() {
            Some(t) => t.table.is_zero(),
            None => self.sample_grid().all(|p| self.ricci_at(p).map(|r| r.max_abs() <= ANALYTIC_TOL).unwrap_or(false)),
        }
    }

    fn sample_grid(&self) -> impl Iterator<Item = Point2> + '_ {
        let w = match self {
            Self::Analytic(a) => a.sample_window,
            _ => [0.5, 2.0, -1.0, 1.0],
        };
        (0..81).map(move |n| {
            let (i, j) = ((n / 9) as f64 / 8.0, (n % 9) as f64 / 8.0);
            Point2::new(w[0] + i * (w[1] - w[0]), w[2] + j * (w[3] - w[2]))
        })
    }
}

pub const ANALYTIC_TOL: f64 = 1e-9;

/// Evaluate an exact table at a point: `table · (x¹)^(−power)`.
pub fn eval_ricci(t: &Scaled<Tensor02<Rational>>, p: Point2) -> Tensor02<f64> {
    let s = p.x1.powi(-t.power);
    Tensor02 { c: t.table.c.clone().map(|row| row.map(|v| v.to_f64().unwrap_or(f64::NAN) * s)) }
}

pub fn eval_nabla(t: &Scaled<Tensor03<Rational>>, p: Point2) -> Tensor03<f64> {
    let s = p.x1.powi(-t.power);
    Tensor03 { c: t.table.c.clone().map(|a| a.map(|row| row.map(|v| v.to_f64().unwrap_or(f64::NAN) * s))) }
}

pub fn eval_curvature(t: &Scaled<CurvatureComponents<Rational>>, p: Point2) -> CurvatureComponents<f64> {
    let s = p.x1.powi(-t.power);
    CurvatureComponents {
        c: t.table.c.clone().map(|a| a.map(|b| b.map(|row| row.map(|v| v.to_f64().unwrap_or(f64::NAN) * s)))),
    }
}
