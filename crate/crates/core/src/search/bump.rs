use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::calculus::normalize_density;
use crate::error::{LabError, Result};
use crate::grid::{Density, Grid, ScalarField};

/// Relative slack on the resolution requirement `eps ≥ 2·max h`.
const RESOLUTION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpProfile {
    /// `Π_i cos²(π d_i / (2 eps))` for `d_i < eps`, zero beyond.
    #[default]
    Cos2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub center: Vec<f64>,
    pub eps: f64,
    #[serde(default)]
    pub profile: BumpProfile,
}

impl BumpSpec {
    /// Bump of width `eps` at the midpoint of the grid's box.
    pub fn centred(grid: &Grid, eps: f64) -> Self {
        BumpSpec {
            center: grid.lengths().iter().map(|l| 0.5 * l).collect(),
            eps,
            profile: BumpProfile::Cos2,
        }
    }

    /// Checks that the bump lives in the box and spans at least two cells per radius.
    pub fn check(&self, grid: &Grid) -> Result<()> {
        if self.center.len() != grid.dim() {
            return Err(LabError::InvalidArgument(format!(
                "bump centre has {} coordinates, grid has dimension {}",
                self.center.len(),
                grid.dim()
            )));
        }
        for (axis, (&c, &l)) in self.center.iter().zip(grid.lengths()).enumerate() {
            if !(0.0..=l).contains(&c) {
                return Err(LabError::InvalidArgument(format!(
                    "bump centre coordinate {c} outside [0, {l}] on axis {axis}"
                )));
            }
        }
        let min_length = grid.lengths().iter().cloned().fold(f64::INFINITY, f64::min);
        if !(self.eps > 0.0) || self.eps > min_length {
            return Err(LabError::InvalidArgument(format!(
                "bump width {} outside (0, {min_length}]",
                self.eps
            )));
        }
        let needed = 2.0 * grid.max_spacing();
        if self.eps < needed * (1.0 - RESOLUTION_SLACK) {
            return Err(LabError::InvalidArgument(format!(
                "bump width {} unresolved: needs at least 2·h = {needed}",
                self.eps
            )));
        }
        Ok(())
    }
}

/// Normalized cos² bump. Distances are taken per axis, wrapping on periodic axes.
pub fn bump_density(grid: &Arc<Grid>, spec: &BumpSpec) -> Result<Density> {
    spec.check(grid)?;
    let periodic = grid.periodic().to_vec();
    let lengths = grid.lengths().to_vec();
    let raw = ScalarField::from_fn(grid.clone(), |x| {
        let mut value = 1.0;
        for axis in 0..x.len() {
            let mut d = (x[axis] - spec.center[axis]).abs();
            if periodic[axis] {
                d = d.min(lengths[axis] - d);
            }
            if d >= spec.eps {
                return 0.0;
            }
            value *= (PI * d / (2.0 * spec.eps)).cos().powi(2);
        }
        value
    })?;
    normalize_density(&raw)
}
