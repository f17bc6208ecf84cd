//! Curvature, normal forms and geodesic structure of locally symmetric
//! affine surfaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`tensor`]: connection charts, curvature, Ricci and `∇ρ`, exact for
//!   Type A/B charts and numeric for analytic ones.
//! * [`catalog`]: the named models (`S1`…`S5`, `H2`, `L2`, the pseudosphere
//!   chart, the flat plane).
//! * [`classify`]: linear normal forms of Type A and Type B charts.
//! * [`geodesic`]: adaptive integration of geodesics and Jacobi fields, the
//!   closed-form `L2` families, exponential-map evaluation and coverage.
//! * [`pseudosphere`]: the pseudosphere in Minkowski 3-space and its universal
//!   cover chart.
//! * [`spray`]: null-geodesic spray charts and the explicit isometries
//!   between `X2`, the pseudosphere and `L2`.

pub mod catalog;
pub mod classify;
pub mod geodesic;
pub mod pseudosphere;
pub mod spray;
pub mod tensor;

pub use catalog::{get_model, Completeness, ModelName, NamedModel};
pub use tensor::{ChristoffelField, Coefficients, Point2, Rational, TangentVector2};
