//! Uniform node grids over boxes and flat tori, and the fields sampled on them.
//!
//! Nodes are linearized row-major with axis 0 slowest. A periodic axis of
//! length `L` with `m` nodes places them at `j·L/m`, `j = 0..m` (half-open);
//! a non-periodic axis places them at `j·L/(m−1)`, endpoints included.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::calculus::{self, QuadratureRule};
use crate::error::{LabError, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// Tolerance on `|∫ω − 1|` accepted by [`Density`].
pub const DENSITY_MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<usize>,
    lengths: Vec<f64>,
    periodic: Vec<bool>,
    spacing: Vec<f64>,
    strides: Vec<usize>,
    quadrature: QuadratureRule,
}

impl Grid {
    /// Builds a grid of dimension `n`. Every slice must have length `n`.
    ///
    /// Periodic axes need at least 2 nodes, non-periodic axes at least 3
    /// (room for the one-sided second-order gradient stencil).
    pub fn new(n: usize, nodes: &[usize], lengths: &[f64], periodic: &[bool]) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(LabError::InvalidGrid(format!(
                "dimension {n} outside 1..={MAX_DIM}"
            )));
        }
        if nodes.len() != n || lengths.len() != n || periodic.len() != n {
            return Err(LabError::InvalidGrid(format!(
                "expected {n} entries per axis list, got m={}, lengths={}, periodic={}",
                nodes.len(),
                lengths.len(),
                periodic.len()
            )));
        }
        for axis in 0..n {
            let min_nodes = if periodic[axis] { 2 } else { 3 };
            if nodes[axis] < min_nodes {
                return Err(LabError::InvalidGrid(format!(
                    "axis {axis} has {} nodes, needs at least {min_nodes}",
                    nodes[axis]
                )));
            }
            if !(lengths[axis] > 0.0 && lengths[axis].is_finite()) {
                return Err(LabError::InvalidGrid(format!(
                    "axis {axis} has non-positive length {}",
                    lengths[axis]
                )));
            }
        }
        let spacing = (0..n)
            .map(|axis| {
                let intervals = if periodic[axis] {
                    nodes[axis]
                } else {
                    nodes[axis] - 1
                };
                lengths[axis] / intervals as f64
            })
            .collect::<Vec<_>>();
        let mut strides = vec![1usize; n];
        for axis in (0..n.saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * nodes[axis + 1];
        }
        let mut grid = Grid {
            nodes: nodes.to_vec(),
            lengths: lengths.to_vec(),
            periodic: periodic.to_vec(),
            spacing,
            strides,
            quadrature: QuadratureRule::default(),
        };
        grid.quadrature = QuadratureRule::for_grid(&grid);
        Ok(grid)
    }

    /// Flat torus with the given node counts and side lengths.
    pub fn torus(nodes: &[usize], lengths: &[f64]) -> Result<Self> {
        Grid::new(nodes.len(), nodes, lengths, &vec![true; nodes.len()])
    }

    /// Unit flat torus `[0,1)^n` with `m` nodes per axis.
    pub fn unit_torus(n: usize, m: usize) -> Result<Self> {
        Grid::new(n, &vec![m; n], &vec![1.0; n], &vec![true; n])
    }

    /// Unit box `[0,1]^n` with `m` nodes per axis.
    pub fn unit_box(n: usize, m: usize) -> Result<Self> {
        Grid::new(n, &vec![m; n], &vec![1.0; n], &vec![false; n])
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn periodic(&self) -> &[bool] {
        &self.periodic
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn quadrature(&self) -> &QuadratureRule {
        &self.quadrature
    }

    /// Quadrature weight of every node.
    pub fn weights(&self) -> &[f64] {
        self.quadrature.weights()
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All axes periodic.
    pub fn is_torus(&self) -> bool {
        self.periodic.iter().all(|&p| p)
    }

    /// No axis periodic.
    pub fn is_box(&self) -> bool {
        self.periodic.iter().all(|&p| !p)
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Euclidean diameter of the box.
    pub fn diameter(&self) -> f64 {
        self.lengths.iter().map(|l| l * l).sum::<f64>().sqrt()
    }

    /// Product of the spacings.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    /// Node coordinates along one axis.
    pub fn axis_coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.nodes[axis])
            .map(|j| j as f64 * self.spacing[axis])
            .collect()
    }

    /// Multi-index of node `k`; entries past `dim()` are zero.
    pub fn unravel(&self, k: usize) -> [usize; MAX_DIM] {
        let mut idx = [0usize; MAX_DIM];
        let mut rest = k;
        for (i, &stride) in idx.iter_mut().zip(&self.strides) {
            *i = rest / stride;
            rest %= stride;
        }
        idx
    }

    /// Linear index of a multi-index.
    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.strides)
            .map(|(i, stride)| i * stride)
            .sum()
    }

    /// Coordinates of node `k`; entries past `dim()` are zero.
    pub fn point(&self, k: usize) -> [f64; MAX_DIM] {
        let idx = self.unravel(k);
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.dim() {
            x[axis] = idx[axis] as f64 * self.spacing[axis];
        }
        x
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    /// Neighbour of node `k` displaced by `offset` along `axis`, wrapping on
    /// periodic axes. `None` when it falls off a non-periodic axis.
    pub fn shift(&self, k: usize, axis: usize, offset: isize) -> Option<usize> {
        let m = self.nodes[axis] as isize;
        let j = (self.unravel(k)[axis]) as isize;
        let target = j + offset;
        let wrapped = if self.periodic[axis] {
            target.rem_euclid(m)
        } else if (0..m).contains(&target) {
            target
        } else {
            return None;
        };
        Some((k as isize + (wrapped - j) * self.strides[axis] as isize) as usize)
    }

    /// Header line of the field CSV format.
    pub fn csv_header(&self) -> String {
        fn join<T: ToString>(items: &[T]) -> String {
            items
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        }
        format!(
            "# grid n={} m={} lengths={} periodic={}",
            self.dim(),
            join(&self.nodes),
            join(&self.lengths),
            join(&self.periodic)
        )
    }

    /// Inverse of [`Grid::csv_header`].
    pub fn parse_csv_header(line: &str) -> Result<Self> {
        let rest = line
            .trim()
            .strip_prefix("# grid")
            .ok_or_else(|| LabError::Parse(format!("missing `# grid` header: {line:?}")))?;
        let mut n = None;
        let mut nodes = None;
        let mut lengths = None;
        let mut periodic = None;
        for token in rest.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| LabError::Parse(format!("malformed header token {token:?}")))?;
            match key {
                "n" => n = Some(parse_item::<usize>(value)?),
                "m" => nodes = Some(parse_list::<usize>(value)?),
                "lengths" => lengths = Some(parse_list::<f64>(value)?),
                "periodic" => periodic = Some(parse_list::<bool>(value)?),
                other => return Err(LabError::Parse(format!("unknown header key {other:?}"))),
            }
        }
        let missing = |name: &str| LabError::Parse(format!("header lacks `{name}`"));
        Grid::new(
            n.ok_or_else(|| missing("n"))?,
            &nodes.ok_or_else(|| missing("m"))?,
            &lengths.ok_or_else(|| missing("lengths"))?,
            &periodic.ok_or_else(|| missing("periodic"))?,
        )
    }
}

fn parse_item<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse::<T>()
        .map_err(|_| LabError::Parse(format!("cannot parse {s:?}")))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',').map(parse_item).collect()
}

/// Real samples at every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        check_finite(&values)?;
        Ok(ScalarField { grid, values })
    }

    /// Samples `sampler` at every node (coordinates passed as a slice of length `dim`).
    pub fn from_fn<F>(grid: Arc<Grid>, sampler: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let n = grid.dim();
        let values = (0..grid.len())
            .map(|k| sampler(&grid.point(k)[..n]))
            .collect();
        ScalarField::new(grid, values)
    }

    pub fn constant(grid: Arc<Grid>, value: f64) -> Result<Self> {
        let len = grid.len();
        ScalarField::new(grid, vec![value; len])
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise map, keeping the grid.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        ScalarField::new(
            self.grid.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// `a·self + b`.
    pub fn affine(&self, a: f64, b: f64) -> Result<Self> {
        self.map(|v| a * v + b)
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &ScalarField, f: F) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        ScalarField::new(self.grid.clone(), values)
    }

    /// CSV text: grid header then one value per line in node order.
    pub fn to_csv(&self) -> String {
        let mut out = self.grid.csv_header();
        out.push('\n');
        for v in &self.values {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| LabError::Parse("empty field CSV".into()))?;
        let grid = Arc::new(Grid::parse_csv_header(header)?);
        let values = lines.map(parse_item::<f64>).collect::<Result<Vec<_>>>()?;
        ScalarField::new(grid, values)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self> {
        ScalarField::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// `n` real components per node, stored node-major: `components[k·n + axis]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Arc<Grid>,
    components: Vec<f64>,
}

impl VectorField {
    pub fn new(grid: Arc<Grid>, components: Vec<f64>) -> Result<Self> {
        let expected = grid.len() * grid.dim();
        if components.len() != expected {
            return Err(LabError::GridMismatch(format!(
                "{} components, expected {expected}",
                components.len()
            )));
        }
        check_finite(&components)?;
        Ok(VectorField { grid, components })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Components at node `k`.
    pub fn at(&self, k: usize) -> &[f64] {
        let n = self.grid.dim();
        &self.components[k * n..(k + 1) * n]
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let n = self.grid.dim();
        let values = self
            .components
            .chunks_exact(n)
            .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect();
        ScalarField {
            grid: self.grid.clone(),
            values,
        }
    }
}

/// A non-negative field with unit integral.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    base: ScalarField,
}

impl Density {
    /// Wraps a field that already satisfies the density invariants.
    /// Use [`calculus::normalize_density`] to rescale an arbitrary non-negative field.
    pub fn new(base: ScalarField) -> Result<Self> {
        if let Some((k, v)) = base.values.iter().enumerate().find(|(_, &v)| v < 0.0) {
            return Err(LabError::InvalidDensity(format!(
                "negative value {v} at node {k}"
            )));
        }
        let mass = calculus::integral(&base);
        if (mass - 1.0).abs() > DENSITY_MASS_TOL {
            return Err(LabError::InvalidDensity(format!(
                "integral {mass} differs from 1"
            )));
        }
        Ok(Density { base })
    }

    /// `ω ≡ 1/vol`.
    pub fn uniform(grid: Arc<Grid>) -> Result<Self> {
        let v = 1.0 / grid.volume();
        Density::new(ScalarField::constant(grid, v)?)
    }

    /// All mass at node `k`: value `1/w_k` there, zero elsewhere.
    pub fn point_mass(grid: Arc<Grid>, k: usize) -> Result<Self> {
        if k >= grid.len() {
            return Err(LabError::InvalidArgument(format!(
                "node {k} out of range for {} nodes",
                grid.len()
            )));
        }
        let mut values = vec![0.0; grid.len()];
        values[k] = 1.0 / grid.weights()[k];
        Density::new(ScalarField::new(grid, values)?)
    }

    /// Convex combination `(1−λ)·self + λ·other`.
    pub fn mix(&self, other: &Density, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(LabError::InvalidArgument(format!(
                "mixing weight {lambda} outside [0,1]"
            )));
        }
        let base = self
            .base
            .zip_with(&other.base, |a, b| (1.0 - lambda) * a + lambda * b)?;
        Density::new(base)
    }

    pub fn field(&self) -> &ScalarField {
        &self.base
    }

    pub fn values(&self) -> &[f64] {
        &self.base.values
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.base.grid
    }

    pub fn into_field(self) -> ScalarField {
        self.base
    }
}

pub(crate) fn ensure_same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if std::ptr::eq(a, b) || a == b {
        Ok(())
    } else {
        Err(LabError::GridMismatch(format!(
            "`{}` vs `{}`",
            a.csv_header(),
            b.csv_header()
        )))
    }
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(node) => Err(LabError::NonFinite {
            node,
            value: values[node],
        }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_axis_is_half_open() {
        let g = Grid::new(1, &[4], &[1.0], &[true]).unwrap();
        assert_eq!(g.spacing(), &[0.25]);
        assert_eq!(g.axis_coordinates(0), vec![0.0, 0.25, 0.5, 0.75]);
    }

    #[test]
    fn box_axis_includes_endpoints() {
        let g = Grid::new(1, &[5], &[1.0], &[false]).unwrap();
        assert_eq!(g.spacing(), &[0.25]);
        assert_eq!(g.axis_coordinates(0), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn anisotropic_torus() {
        let g = Grid::new(2, &[2, 4], &[1.0, 2.0], &[true, true]).unwrap();
        assert_eq!(g.spacing(), &[0.5, 0.5]);
        assert_eq!(g.len(), 8);
        // axis 0 slowest
        assert_eq!(g.point(1)[..2], [0.0, 0.5]);
        assert_eq!(g.point(4)[..2], [0.5, 0.0]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(0, &[], &[], &[]).is_err());
        assert!(Grid::new(4, &[3; 4], &[1.0; 4], &[true; 4]).is_err());
        assert!(Grid::new(1, &[2], &[1.0], &[false]).is_err());
        assert!(Grid::new(1, &[1], &[1.0], &[true]).is_err());
        assert!(Grid::new(1, &[4], &[0.0], &[true]).is_err());
        assert!(Grid::new(1, &[4], &[-1.0], &[true]).is_err());
        assert!(Grid::new(2, &[4], &[1.0], &[true]).is_err());
    }

    #[test]
    fn sampling_examples() {
        let torus = Arc::new(Grid::unit_torus(1, 4).unwrap());
        let sine =
            ScalarField::from_fn(torus.clone(), |x| (2.0 * std::f64::consts::PI * x[0]).sin())
                .unwrap();
        let expected = [0.0, 1.0, 0.0, -1.0];
        for (v, e) in sine.values().iter().zip(expected) {
            assert!((v - e).abs() < 1e-15);
        }
        let boxed = Arc::new(Grid::unit_box(1, 5).unwrap());
        let id = ScalarField::from_fn(boxed, |x| x[0]).unwrap();
        assert_eq!(id.values(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let c = ScalarField::from_fn(torus, |_| 3.0).unwrap();
        assert!(c.values().iter().all(|&v| v == 3.0));
    }

    #[test]
    fn sampler_must_be_finite() {
        let g = Arc::new(Grid::unit_box(1, 5).unwrap());
        let err = ScalarField::from_fn(g, |x| 1.0 / x[0]).unwrap_err();
        assert!(matches!(err, LabError::NonFinite { node: 0, .. }));
    }

    #[test]
    fn shift_wraps_only_periodic_axes() {
        let g = Grid::new(2, &[3, 4], &[1.0, 1.0], &[false, true]).unwrap();
        let k = g.ravel(&[0, 0]);
        assert_eq!(g.shift(k, 1, -1), Some(g.ravel(&[0, 3])));
        assert_eq!(g.shift(k, 0, -1), None);
        assert_eq!(g.shift(k, 0, 2), Some(g.ravel(&[2, 0])));
    }

    #[test]
    fn csv_round_trip() {
        let g = Arc::new(Grid::new(2, &[3, 4], &[1.0, 2.5], &[false, true]).unwrap());
        let f = ScalarField::from_fn(g, |x| x[0] * 0.1 + x[1].sin()).unwrap();
        let text = f.to_csv();
        assert!(text.starts_with("# grid n=2 m=3,4 lengths=1,2.5 periodic=false,true\n"));
        assert_eq!(ScalarField::from_csv(&text).unwrap(), f);
    }

    #[test]
    fn density_invariants() {
        let g = Arc::new(Grid::unit_torus(2, 8).unwrap());
        assert!(Density::uniform(g.clone()).is_ok());
        assert!(Density::point_mass(g.clone(), 5).is_ok());
        assert!(Density::new(ScalarField::constant(g.clone(), 2.0).unwrap()).is_err());
        let mut v = vec![1.0; g.len()];
        v[0] = -0.5;
        v[1] = 2.5;
        assert!(Density::new(ScalarField::new(g, v).unwrap()).is_err());
    }
}
