//! A numerical laboratory for weighted Poincaré–Sobolev inequalities
//!
//! ```text
//! ‖f − E_ω[f]‖_{L^r} ≤ C ‖ω‖_{L^q}^{n/((n−1)p)} ‖df‖_{L^p}
//! ```
//!
//! on uniform discretizations of boxes and flat tori in dimensions 1–3.
//! The crate is organised bottom-up:
//!
//! * [`grid`]: node grids, scalar/vector fields, densities, CSV serialization.
//! * [`calculus`]: quadrature, `L^p` norms, (weighted) means, finite-difference gradients.
//! * [`inequality`]: exponent validation and the deficit / ratio functionals.
//! * [`riesz`]: the truncated Riesz potential and its Young-inequality certificate.
//! * [`pullback`]: covering maps of flat tori, coarea identities, ball covers and spanning trees.
//! * [`search`]: bump densities, random trigonometric fields, deficit ascent and scaling sweeps.
//! * [`lab`]: the config-driven experiment runner behind the `poincare-lab` binary.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod error;
pub mod grid;
pub mod inequality;
pub mod lab;
pub mod pullback;
pub mod riesz;
pub mod search;

pub use error::{HypothesisViolation, LabError, Result};
pub use grid::{Density, Grid, ScalarField, VectorField};
pub use inequality::ExponentConfig;

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
