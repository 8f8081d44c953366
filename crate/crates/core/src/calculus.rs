//! Quadrature, `L^p` norms, means and finite-difference gradients.
//!
//! Every reduction goes through [`pairwise_sum`], whose reduction tree is
//! fixed by node order, so results do not depend on thread scheduling.

use crate::error::{LabError, Result};
use crate::grid::{ensure_same_grid, Density, Grid, ScalarField, VectorField};

/// Per-node quadrature weights: equal weights `Π h_i` on periodic axes,
/// trapezoid weights on non-periodic axes, tensorized.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadratureRule {
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn for_grid(grid: &Grid) -> Self {
        let axis_weights: Vec<Vec<f64>> = (0..grid.dim())
            .map(|axis| {
                let m = grid.nodes()[axis];
                let h = grid.spacing()[axis];
                (0..m)
                    .map(|j| {
                        if !grid.periodic()[axis] && (j == 0 || j == m - 1) {
                            0.5 * h
                        } else {
                            h
                        }
                    })
                    .collect()
            })
            .collect();
        let weights = (0..grid.len())
            .map(|k| {
                let idx = grid.unravel(k);
                axis_weights
                    .iter()
                    .enumerate()
                    .map(|(axis, w)| w[idx[axis]])
                    .product()
            })
            .collect();
        QuadratureRule { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Sum of the weights (the box volume up to rounding).
    pub fn total(&self) -> f64 {
        pairwise_sum(&self.weights)
    }
}

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (cascade) summation with a fixed split at the midpoint.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        values.iter().sum()
    } else {
        let (lo, hi) = values.split_at(values.len() / 2);
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

/// `Σ w_k v_k` over matching slices.
pub fn weighted_sum(weights: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), values.len());
    let products: Vec<f64> = weights.iter().zip(values).map(|(w, v)| w * v).collect();
    pairwise_sum(&products)
}

/// Checks that `p` is an admissible Lebesgue exponent (`p ≥ 1` or `p = ∞`).
pub fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(LabError::InvalidExponent(format!(
            "p = {p}, need p >= 1 or p = inf"
        )))
    } else {
        Ok(())
    }
}

/// Discrete `L^p` norm of `values` under `weights`; `p = ∞` gives the max norm.
///
/// Values are scaled by their maximum before the power is taken, so large
/// exponents neither overflow nor underflow.
pub fn lp_norm_values(weights: &[f64], values: &[f64], p: f64) -> Result<f64> {
    check_exponent(p)?;
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if p.is_infinite() || peak == 0.0 {
        return Ok(peak);
    }
    let terms: Vec<f64> = if p == 1.0 {
        weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v.abs())
            .collect()
    } else if p == 2.0 {
        weights
            .iter()
            .zip(values)
            .map(|(w, v)| {
                let s = v / peak;
                w * s * s
            })
            .collect()
    } else {
        weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * (v.abs() / peak).powf(p))
            .collect()
    };
    let sum = pairwise_sum(&terms);
    Ok(if p == 1.0 {
        sum
    } else if p == 2.0 {
        peak * sum.sqrt()
    } else {
        peak * sum.powf(1.0 / p)
    })
}

/// Quadrature integral `Σ w_k f_k`.
pub fn integral(field: &ScalarField) -> f64 {
    weighted_sum(field.grid().weights(), field.values())
}

/// `(Σ w_k |f_k|^p)^{1/p}`, or `max |f_k|` for `p = ∞`.
pub fn lp_norm(field: &ScalarField, p: f64) -> Result<f64> {
    lp_norm_values(field.grid().weights(), field.values(), p)
}

/// Unweighted average `∫f / vol`.
pub fn mean(field: &ScalarField) -> f64 {
    integral(field) / field.grid().volume()
}

/// `E_ω[f] = ∫ f ω`, clamped into `[min f, max f]` to absorb rounding in the density mass.
pub fn weighted_mean(field: &ScalarField, density: &Density) -> Result<f64> {
    ensure_same_grid(field.grid(), density.grid())?;
    Ok(weighted_mean_values(
        field.grid().weights(),
        density.values(),
        field.values(),
    ))
}

/// Slice form of [`weighted_mean`].
pub fn weighted_mean_values(weights: &[f64], omega: &[f64], values: &[f64]) -> f64 {
    let products: Vec<f64> = weights
        .iter()
        .zip(omega)
        .zip(values)
        .map(|((w, o), v)| w * o * v)
        .collect();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    pairwise_sum(&products).clamp(lo, hi)
}

/// Divides a non-negative field by its integral.
pub fn normalize_density(field: &ScalarField) -> Result<Density> {
    if let Some((k, v)) = field.values().iter().enumerate().find(|(_, &v)| v < 0.0) {
        return Err(LabError::InvalidDensity(format!(
            "negative value {v} at node {k}"
        )));
    }
    let mass = integral(field);
    if mass <= 0.0 {
        return Err(LabError::InvalidDensity(
            "field integrates to zero".to_string(),
        ));
    }
    Density::new(field.map(|v| v / mass)?)
}

/// Second-order finite-difference gradient.
///
/// Central differences on interior and periodic nodes; one-sided
/// `(−3f_0 + 4f_1 − f_2)/(2h)` (and its mirror) at non-periodic boundaries.
pub fn gradient(field: &ScalarField) -> Result<VectorField> {
    let grid = field.grid();
    let n = grid.dim();
    for axis in 0..n {
        let min_nodes = if grid.periodic()[axis] { 2 } else { 3 };
        if grid.nodes()[axis] < min_nodes {
            return Err(LabError::InvalidGrid(format!(
                "axis {axis} too small for the gradient stencil"
            )));
        }
    }
    let f = field.values();
    let mut components = vec![0.0; grid.len() * n];
    for k in 0..grid.len() {
        let idx = grid.unravel(k);
        for axis in 0..n {
            let m = grid.nodes()[axis];
            let h = grid.spacing()[axis];
            let stride = grid.stride(axis);
            let j = idx[axis];
            let d = if grid.periodic()[axis] {
                let up = if j + 1 == m {
                    k + stride - m * stride
                } else {
                    k + stride
                };
                let down = if j == 0 {
                    k + (m - 1) * stride
                } else {
                    k - stride
                };
                (f[up] - f[down]) / (2.0 * h)
            } else if j == 0 {
                (-3.0 * f[k] + 4.0 * f[k + stride] - f[k + 2 * stride]) / (2.0 * h)
            } else if j == m - 1 {
                (3.0 * f[k] - 4.0 * f[k - stride] + f[k - 2 * stride]) / (2.0 * h)
            } else {
                (f[k + stride] - f[k - stride]) / (2.0 * h)
            };
            components[k * n + axis] = d;
        }
    }
    VectorField::new(grid.clone(), components)
}

/// `L^p` norm of the pointwise Euclidean magnitude.
pub fn gradient_lp_norm(vf: &VectorField, p: f64) -> Result<f64> {
    lp_norm(&vf.magnitude(), p)
}
