//! Named locally symmetric models as ready-made connection charts.
//!
//! Model names are stable strings shared with the command line:
//! `S1`, `S2`, `S3`, `S3~`, `S4:c=<rational>`, `S5`, `H2`, `L2`,
//! `pseudosphere` and `flat`.

use std::fmt;
use std::str::FromStr;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::tensor::{
    eval_ricci, parse_rational, AnalyticField, ChristoffelField, Coefficients, Gamma, Point2, Rational, Scaled,
    Tensor02,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),
    #[error("model {0} carries no metric")]
    NoMetric(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelName {
    S1,
    S2,
    S3,
    S3Tilde,
    /// `S4(c)`, `c ≠ 0`.
    S4(Rational),
    S5,
    H2,
    L2,
    PseudosphereChart,
    FlatPlane,
}

impl ModelName {
    pub fn s4(c: Rational) -> Result<Self, CatalogError> {
        if c.is_zero() {
            return Err(CatalogError::InvalidParameter("S4(c) requires c != 0".into()));
        }
        Ok(Self::S4(c))
    }

    /// Every model in the catalog, with `S4(±1)` standing in for the family.
    pub fn all() -> Vec<ModelName> {
        let one = Rational::from_integer(1.into());
        vec![
            Self::S1,
            Self::S2,
            Self::S3,
            Self::S3Tilde,
            Self::S4(one.clone()),
            Self::S4(-one),
            Self::S5,
            Self::H2,
            Self::L2,
            Self::PseudosphereChart,
            Self::FlatPlane,
        ]
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::S1 => f.write_str("S1"),
            Self::S2 => f.write_str("S2"),
            Self::S3 => f.write_str("S3"),
            Self::S3Tilde => f.write_str("S3~"),
            Self::S4(c) => write!(f, "S4:c={c}"),
            Self::S5 => f.write_str("S5"),
            Self::H2 => f.write_str("H2"),
            Self::L2 => f.write_str("L2"),
            Self::PseudosphereChart => f.write_str("pseudosphere"),
            Self::FlatPlane => f.write_str("flat"),
        }
    }
}

impl FromStr for ModelName {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Ok(match s {
            "S1" => Self::S1,
            "S2" => Self::S2,
            "S3" => Self::S3,
            "S3~" => Self::S3Tilde,
            "S5" => Self::S5,
            "H2" => Self::H2,
            "L2" => Self::L2,
            "pseudosphere" => Self::PseudosphereChart,
            "flat" => Self::FlatPlane,
            _ => {
                let c = s.strip_prefix("S4:c=").ok_or_else(|| CatalogError::UnknownModel(s.to_string()))?;
                let c = parse_rational(c).map_err(|e| CatalogError::InvalidParameter(e.to_string()))?;
                Self::s4(c)?
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    Complete,
    Incomplete,
}

/// A metric on a chart with hand-coded first derivatives;
/// `dg(p)[m][i][j] = ∂_m g_ij`.
#[derive(Debug, Clone, Copy)]
pub struct Metric {
    g: fn(Point2) -> [[f64; 2]; 2],
    dg: fn(Point2) -> [[[f64; 2]; 2]; 2],
}

impl Metric {
    pub fn at(&self, p: Point2) -> [[f64; 2]; 2] {
        (self.g)(p)
    }

    pub fn derivative_at(&self, p: Point2) -> [[[f64; 2]; 2]; 2] {
        (self.dg)(p)
    }

    pub fn inner(&self, p: Point2, u: [f64; 2], v: [f64; 2]) -> f64 {
        let g = self.at(p);
        (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| g[i][j] * u[i] * v[j]).sum()
    }

    /// Levi-Civita symbols from the first Christoffel identity
    /// `Γ_{ijk} = ½(∂_i g_jk + ∂_j g_ik − ∂_k g_ij)`, then raising `k`.
    pub fn levi_civita(&self, p: Point2) -> Gamma<f64> {
        let g = self.at(p);
        let dg = self.derivative_at(p);
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        let inv = [[g[1][1] / det, -g[0][1] / det], [-g[1][0] / det, g[0][0] / det]];
        let lower = |i: usize, j: usize, k: usize| 0.5 * (dg[i][j][k] + dg[j][i][k] - dg[k][i][j]);
        std::array::from_fn(|i| {
            std::array::from_fn(|j| std::array::from_fn(|l| (0..2).map(|k| inv[l][k] * lower(i, j, k)).sum()))
        })
    }
}

fn h2_g(p: Point2) -> [[f64; 2]; 2] {
    let s = 1.0 / (p.x1 * p.x1);
    [[s, 0.0], [0.0, s]]
}

fn h2_dg(p: Point2) -> [[[f64; 2]; 2]; 2] {
    let s = -2.0 / p.x1.powi(3);
    [[[s, 0.0], [0.0, s]], [[0.0; 2]; 2]]
}

// L2 metric: (−(dx¹)² + (dx²)²)/(x¹)², which coincides with its Ricci tensor.
fn l2_g(p: Point2) -> [[f64; 2]; 2] {
    let s = 1.0 / (p.x1 * p.x1);
    [[-s, 0.0], [0.0, s]]
}

fn l2_dg(p: Point2) -> [[[f64; 2]; 2]; 2] {
    let s = -2.0 / p.x1.powi(3);
    [[[-s, 0.0], [0.0, s]], [[0.0; 2]; 2]]
}

fn pseudo_g(p: Point2) -> [[f64; 2]; 2] {
    [[-1.0, 0.0], [0.0, p.x1.cosh().powi(2)]]
}

fn pseudo_dg(p: Point2) -> [[[f64; 2]; 2]; 2] {
    [[[0.0, 0.0], [0.0, 2.0 * p.x1.cosh() * p.x1.sinh()]], [[0.0; 2]; 2]]
}

/// Expected Ricci tensor recorded with a model.
#[derive(Debug, Clone)]
pub enum ExpectedRicci {
    Table(Scaled<Tensor02<Rational>>),
    Function(fn(Point2) -> Tensor02<f64>),
}

impl ExpectedRicci {
    pub fn at(&self, p: Point2) -> Tensor02<f64> {
        match self {
            Self::Table(t) => eval_ricci(t, p),
            Self::Function(f) => f(p),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedModel {
    pub name: ModelName,
    pub field: ChristoffelField,
    pub metric: Option<Metric>,
    pub expected_ricci: ExpectedRicci,
    pub completeness: Completeness,
    /// `c` for `S4(c)`.
    pub parameter: Option<Rational>,
}

fn diag(a: Rational, b: Rational, power: i32) -> ExpectedRicci {
    let z = Rational::zero;
    ExpectedRicci::Table(Scaled { table: Tensor02 { c: [[a, z()], [z(), b]] }, power })
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn s3_tilde_field() -> AnalyticField {
    AnalyticField::new(
        "S3~",
        |p| [0.0, 0.0, 0.0, 0.0, p.x1, 0.0],
        |_| [[0.0, 0.0, 0.0, 0.0, 1.0, 0.0], [0.0; 6]],
        [-2.0, 2.0, -2.0, 2.0],
    )
}

/// The universal-cover chart `(u, v)` of the pseudosphere, with
/// `Γ_{12}^2 = tanh u` and `Γ_{22}^1 = cosh u sinh u`.
pub fn pseudosphere_field() -> AnalyticField {
    AnalyticField::new(
        "pseudosphere",
        |p| [0.0, 0.0, 0.0, p.x1.tanh(), p.x1.cosh() * p.x1.sinh(), 0.0],
        |p| [[0.0, 0.0, 0.0, 1.0 / p.x1.cosh().powi(2), (2.0 * p.x1).cosh(), 0.0], [0.0; 6]],
        [-2.0, 2.0, -3.0, 3.0],
    )
}

pub fn get_model(name: &ModelName) -> Result<NamedModel, CatalogError> {
    use Completeness::*;
    let type_a = |v: [(i64, i64); 6]| ChristoffelField::TypeA(Coefficients::from_ratios(v));
    let type_b = |v: [(i64, i64); 6]| ChristoffelField::TypeB(Coefficients::from_ratios(v));
    let (field, metric, expected_ricci, completeness, parameter) = match name {
        ModelName::S1 => (
            type_a([(-1, 1), (0, 1), (-1, 2), (0, 1), (0, 1), (0, 1)]),
            None,
            diag(q(0, 1), q(-1, 4), 0),
            Incomplete,
            None,
        ),
        ModelName::S2 => (
            type_a([(0, 1), (0, 1), (-1, 2), (0, 1), (0, 1), (0, 1)]),
            None,
            diag(q(0, 1), q(-1, 4), 0),
            Complete,
            None,
        ),
        ModelName::S3 => (
            type_a([(-1, 1), (0, 1), (0, 1), (0, 1), (-1, 1), (0, 1)]),
            None,
            diag(q(0, 1), q(1, 1), 0),
            Incomplete,
            None,
        ),
        ModelName::S3Tilde => (
            ChristoffelField::Analytic(s3_tilde_field()),
            None,
            ExpectedRicci::Function(|_| Tensor02 { c: [[0.0, 0.0], [0.0, 1.0]] }),
            Complete,
            None,
        ),
        ModelName::S4(c) => {
            if c.is_zero() {
                return Err(CatalogError::InvalidParameter("S4(c) requires c != 0".into()));
            }
            let z = Rational::zero;
            let coeffs = Coefficients::new([q(-1, 1), z(), z(), c.clone(), z(), z()]);
            let ricci = diag(-(c.clone() * c.clone()), z(), 2);
            (ChristoffelField::TypeB(coeffs), None, ricci, Complete, Some(c.clone()))
        }
        ModelName::S5 => (
            type_b([(-1, 1), (1, 1), (0, 1), (-1, 2), (0, 1), (0, 1)]),
            None,
            diag(q(-1, 4), q(0, 1), 2),
            Complete,
            None,
        ),
        ModelName::H2 => (
            type_b([(-1, 1), (0, 1), (0, 1), (-1, 1), (1, 1), (0, 1)]),
            Some(Metric { g: h2_g, dg: h2_dg }),
            diag(q(-1, 1), q(-1, 1), 2),
            Complete,
            None,
        ),
        ModelName::L2 => (
            type_b([(-1, 1), (0, 1), (0, 1), (-1, 1), (-1, 1), (0, 1)]),
            Some(Metric { g: l2_g, dg: l2_dg }),
            diag(q(-1, 1), q(1, 1), 2),
            Incomplete,
            None,
        ),
        ModelName::PseudosphereChart => (
            ChristoffelField::Analytic(pseudosphere_field()),
            Some(Metric { g: pseudo_g, dg: pseudo_dg }),
            ExpectedRicci::Function(|p| Tensor02 { c: [[-1.0, 0.0], [0.0, p.x1.cosh().powi(2)]] }),
            Complete,
            None,
        ),
        ModelName::FlatPlane => {
            (ChristoffelField::TypeA(Coefficients::zero()), None, diag(q(0, 1), q(0, 1), 0), Complete, None)
        }
    };
    Ok(NamedModel { name: name.clone(), field, metric, expected_ricci, completeness, parameter })
}

pub fn model_metric(name: &ModelName) -> Result<Metric, CatalogError> {
    get_model(name)?.metric.ok_or_else(|| CatalogError::NoMetric(name.to_string()))
}

impl NamedModel {
    /// `c` as a float, for `S4(c)`.
    pub fn parameter_f64(&self) -> Option<f64> {
        self.parameter.as_ref().and_then(|c| c.to_f64())
    }
}
