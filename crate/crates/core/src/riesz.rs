//! The truncated Riesz potential `ω̃ = ω ∗ (χ_{|x|≤d} / |x|^{n−1})` on box
//! grids, closed-form kernel norms, and the Young-inequality certificate
//! `‖ω̃‖_{L^n} ≤ ‖K‖_{L^s} ‖ω‖_{L^q}`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{lp_norm, pairwise_sum};
use crate::error::{HypothesisViolation, LabError, Result};
use crate::grid::{Density, Grid, ScalarField, MAX_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszKernelSpec {
    pub n: usize,
    /// Truncation radius.
    pub d: f64,
}

impl RieszKernelSpec {
    pub fn new(n: usize, d: f64) -> Result<Self> {
        if n == 0 {
            return Err(LabError::InvalidArgument(
                "kernel dimension must be >= 1".into(),
            ));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(LabError::InvalidArgument(format!(
                "truncation radius must be positive, got {d}"
            )));
        }
        Ok(RieszKernelSpec { n, d })
    }

    /// Kernel truncated at the grid diameter.
    pub fn for_grid(grid: &Grid) -> Result<Self> {
        RieszKernelSpec::new(grid.dim(), grid.diameter())
    }

    /// `χ_{|x|≤d} / |x|^{n−1}` at radius `rho > 0`.
    pub fn eval(&self, rho: f64) -> f64 {
        if rho > self.d {
            0.0
        } else {
            rho.powi(1 - self.n as i32)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YoungReport {
    /// `‖ω̃‖_{L^n}`.
    pub lhs: f64,
    /// `‖K‖_{L^s}` at the Young exponent.
    pub kernel_norm: f64,
    pub rhs: f64,
    /// `lhs / rhs`.
    pub slack: f64,
    pub n: usize,
    pub q: f64,
    pub d: f64,
}

/// Surface area of the unit sphere `S^{n−1}`: `2π^{n/2} / Γ(n/2)`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// `Γ(k/2)` for a positive integer `k`.
fn gamma_half(k: usize) -> f64 {
    let (mut value, mut x) = if k.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    while x < k as f64 / 2.0 {
        value *= x;
        x += 1.0;
    }
    value
}

/// Exponent `s` with `1/s = 1 + 1/n − 1/q`: Young maps `L^s ∗ L^q → L^n`.
///
/// Values below 1 (when `q > n`) are returned as-is; [`young_check`] then
/// falls back to `s = 1`.
pub fn young_exponent(n: usize, q: f64) -> Result<f64> {
    if !(2.0 * q > n as f64) {
        return Err(LabError::hypothesis(
            HypothesisViolation::QTooSmall,
            format!("q > n/2 failed (n = {n}, q = {q})"),
        ));
    }
    let nf = n as f64;
    Ok(1.0 / (1.0 + 1.0 / nf - 1.0 / q))
}

/// `‖K‖_{L^s} = (σ_{n−1} d^{n−(n−1)s} / (n − (n−1)s))^{1/s}`, finite for `1 ≤ s < n/(n−1)`.
pub fn kernel_lr_norm(spec: &RieszKernelSpec, s: f64) -> Result<f64> {
    let nf = spec.n as f64;
    let power = nf - (nf - 1.0) * s;
    if !(s >= 1.0) || power <= 0.0 {
        return Err(LabError::InvalidExponent(format!(
            "kernel is in L^s only for 1 <= s < n/(n-1) (n = {}, s = {s})",
            spec.n
        )));
    }
    Ok((sphere_area(spec.n) * spec.d.powf(power) / power).powf(1.0 / s))
}

/// Average of the kernel over the cell around the singularity: the kernel's
/// integral over the ball of radius `min h / 2`, divided by the cell volume.
fn singular_cell_value(spec: &RieszKernelSpec, grid: &Grid) -> f64 {
    let radius = 0.5 * grid.spacing().iter().cloned().fold(f64::INFINITY, f64::min);
    let ball = sphere_area(spec.n) * radius.min(spec.d);
    ball / grid.cell_volume()
}

/// Kernel sampled at every index offset `o ∈ Π [−(m_i−1), m_i−1]`, row-major.
struct OffsetTable {
    extent: [usize; MAX_DIM],
    values: Vec<f64>,
}

impl OffsetTable {
    fn new(spec: &RieszKernelSpec, grid: &Grid) -> Self {
        let n = grid.dim();
        let mut extent = [1usize; MAX_DIM];
        for (e, &m) in extent.iter_mut().zip(grid.nodes()) {
            *e = 2 * m - 1;
        }
        let total: usize = extent.iter().product();
        let centre_value = singular_cell_value(spec, grid);
        let values = (0..total)
            .map(|flat| {
                let mut rest = flat;
                let mut rho2 = 0.0;
                let mut is_origin = true;
                for axis in (0..n).rev() {
                    let o = (rest % extent[axis]) as isize - (grid.nodes()[axis] as isize - 1);
                    rest /= extent[axis];
                    let x = o as f64 * grid.spacing()[axis];
                    rho2 += x * x;
                    is_origin &= o == 0;
                }
                if is_origin {
                    centre_value
                } else {
                    spec.eval(rho2.sqrt())
                }
            })
            .collect();
        OffsetTable { extent, values }
    }

    fn at(&self, grid: &Grid, target: &[usize; MAX_DIM], source: &[usize; MAX_DIM]) -> f64 {
        let mut flat = 0;
        for axis in 0..grid.dim() {
            let o = target[axis] + grid.nodes()[axis] - 1 - source[axis];
            flat = flat * self.extent[axis] + o;
        }
        self.values[flat]
    }
}

/// Truncated Riesz potential of an arbitrary field on a box grid (zero outside the box).
///
/// `ω̃(z_j) = Σ_k w_k ω_k K(z_j − x_k)`; the `k = j` term uses the cell average
/// of the kernel. Output nodes are evaluated in parallel, each with a fixed
/// summation order.
pub fn riesz_potential_field(omega: &ScalarField, spec: &RieszKernelSpec) -> Result<ScalarField> {
    let grid: &Arc<Grid> = omega.grid();
    if !grid.is_box() {
        return Err(LabError::InvalidGrid(
            "the Riesz potential extends ω by zero and needs a non-periodic grid".into(),
        ));
    }
    if spec.n != grid.dim() {
        return Err(LabError::GridMismatch(format!(
            "kernel dimension {} vs grid dimension {}",
            spec.n,
            grid.dim()
        )));
    }
    let table = OffsetTable::new(spec, grid);
    let mass: Vec<f64> = grid
        .weights()
        .iter()
        .zip(omega.values())
        .map(|(w, o)| w * o)
        .collect();
    let indices: Vec<[usize; MAX_DIM]> = (0..grid.len()).map(|k| grid.unravel(k)).collect();
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let target = &indices[j];
            let terms: Vec<f64> = mass
                .iter()
                .zip(&indices)
                .map(|(m, source)| m * table.at(grid, target, source))
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    ScalarField::new(grid.clone(), values)
}

/// Truncated Riesz potential of a density.
pub fn riesz_potential(omega: &Density, spec: &RieszKernelSpec) -> Result<ScalarField> {
    riesz_potential_field(omega.field(), spec)
}

/// Compares `‖ω̃‖_{L^n}` with the Young bound `‖K‖_{L^s} ‖ω‖_{L^q}`.
pub fn young_check(omega: &Density, q: f64, spec: &RieszKernelSpec) -> Result<YoungReport> {
    let n = spec.n;
    let nf = n as f64;
    let s = young_exponent(n, q)?;
    // For q > n the Young exponent drops below 1; use the L^1 kernel norm and
    // Hölder on the bounded box to pass from L^q to L^n.
    let (s, holder) = if s < 1.0 {
        (1.0, omega.grid().volume().powf(1.0 / nf - 1.0 / q))
    } else {
        (s, 1.0)
    };
    let kernel_norm = kernel_lr_norm(spec, s)?;
    let potential = riesz_potential(omega, spec)?;
    let lhs = lp_norm(&potential, nf)?;
    let rhs = kernel_norm * lp_norm(omega.field(), q)? * holder;
    Ok(YoungReport {
        lhs,
        kernel_norm,
        rhs,
        slack: lhs / rhs,
        n,
        q,
        d: spec.d,
    })
}
