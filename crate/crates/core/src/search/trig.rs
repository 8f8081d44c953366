use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::calculus::normalize_density;
use crate::error::{LabError, Result};
use crate::grid::{Density, Grid, ScalarField, MAX_DIM};

/// Nonzero integer wave vectors with `|k_i| ≤ max_freq`, one per `±k` pair
/// (first nonzero component positive), in lexicographic order.
pub fn wave_vectors(n: usize, max_freq: usize) -> Vec<[i64; MAX_DIM]> {
    let f = max_freq as i64;
    let mut out = Vec::new();
    let mut k = [0i64; MAX_DIM];
    fn recurse(
        axis: usize,
        n: usize,
        f: i64,
        k: &mut [i64; MAX_DIM],
        out: &mut Vec<[i64; MAX_DIM]>,
    ) {
        if axis == n {
            if let Some(&first) = k[..n].iter().find(|&&c| c != 0) {
                if first > 0 {
                    out.push(*k);
                }
            }
            return;
        }
        for c in -f..=f {
            k[axis] = c;
            recurse(axis + 1, n, f, k, out);
        }
        k[axis] = 0;
    }
    recurse(0, n, f, &mut k, &mut out);
    out
}

/// `f(x) = Σ_k a_k cos(2π k·x/L) + b_k sin(2π k·x/L)` over [`wave_vectors`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    lengths: Vec<f64>,
    modes: Vec<[i64; MAX_DIM]>,
    /// `[a_0, b_0, a_1, b_1, ...]`.
    coefficients: Vec<f64>,
}

impl TrigPolynomial {
    pub fn new(lengths: &[f64], max_freq: usize, coefficients: Vec<f64>) -> Result<Self> {
        let modes = wave_vectors(lengths.len(), max_freq);
        if coefficients.len() != 2 * modes.len() {
            return Err(LabError::InvalidArgument(format!(
                "{} coefficients for {} modes",
                coefficients.len(),
                modes.len()
            )));
        }
        Ok(TrigPolynomial {
            lengths: lengths.to_vec(),
            modes,
            coefficients,
        })
    }

    /// Standard-normal coefficients from a ChaCha8 stream seeded with `seed`.
    pub fn random(lengths: &[f64], max_freq: usize, seed: u64) -> Result<Self> {
        if max_freq == 0 {
            return Err(LabError::InvalidArgument("max_freq must be >= 1".into()));
        }
        let count = 2 * wave_vectors(lengths.len(), max_freq).len();
        let coefficients = random_coefficients(count, seed);
        TrigPolynomial::new(lengths, max_freq, coefficients)
    }

    pub fn modes(&self) -> &[[i64; MAX_DIM]] {
        &self.modes
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Phase `2π k·x/L` of mode `j` at `x`.
    fn phase(&self, j: usize, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.lengths)
            .zip(&self.modes[j])
            .map(|((xi, l), &k)| 2.0 * PI * k as f64 * xi / l)
            .sum()
    }

    /// Value of basis function `i` (cos of mode `i/2` for even `i`, sin for odd).
    pub fn basis(&self, i: usize, x: &[f64]) -> f64 {
        let phase = self.phase(i / 2, x);
        if i.is_multiple_of(2) {
            phase.cos()
        } else {
            phase.sin()
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (0..self.modes.len())
            .map(|j| {
                let phase = self.phase(j, x);
                self.coefficients[2 * j] * phase.cos() + self.coefficients[2 * j + 1] * phase.sin()
            })
            .sum()
    }

    /// Samples the polynomial on any grid (including boxes).
    pub fn sample(&self, grid: &Arc<Grid>) -> Result<ScalarField> {
        ScalarField::from_fn(grid.clone(), |x| self.eval(x))
    }
}

pub(crate) fn random_coefficients(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect()
}

/// Errors unless `grid` is periodic with every axis resolving `max_freq` below Nyquist.
pub(crate) fn check_nyquist(grid: &Grid, max_freq: usize) -> Result<()> {
    if !grid.is_torus() {
        return Err(LabError::InvalidGrid(
            "trigonometric fields need a periodic grid".into(),
        ));
    }
    if max_freq == 0 {
        return Err(LabError::InvalidArgument("max_freq must be >= 1".into()));
    }
    if let Some(&m) = grid.nodes().iter().find(|&&m| 2 * max_freq >= m) {
        return Err(LabError::InvalidArgument(format!(
            "max_freq {max_freq} not below the Nyquist limit of an axis with {m} nodes"
        )));
    }
    Ok(())
}

/// Random zero-mean trigonometric polynomial sampled on a periodic grid.
pub fn random_field(grid: &Arc<Grid>, max_freq: usize, seed: u64) -> Result<ScalarField> {
    check_nyquist(grid, max_freq)?;
    TrigPolynomial::random(grid.lengths(), max_freq, seed)?.sample(grid)
}

/// `exp(g/√K)` normalized to unit mass, with `g` a random trigonometric
/// polynomial of `K` modes. Strictly positive; works on box grids as well.
pub fn random_density(grid: &Arc<Grid>, max_freq: usize, seed: u64) -> Result<Density> {
    let poly = TrigPolynomial::random(grid.lengths(), max_freq, seed)?;
    let scale = 1.0 / (poly.modes().len() as f64).sqrt();
    let raw = ScalarField::from_fn(grid.clone(), |x| (scale * poly.eval(x)).exp())?;
    normalize_density(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::mean;

    #[test]
    fn mode_counts() {
        assert_eq!(wave_vectors(1, 4).len(), 4);
        assert_eq!(wave_vectors(2, 4).len(), 40);
        assert_eq!(wave_vectors(3, 1).len(), 13);
        assert!(wave_vectors(2, 2)
            .iter()
            .all(|k| k[0] > 0 || (k[0] == 0 && k[1] > 0)));
    }

    #[test]
    fn random_fields_are_seeded_and_zero_mean() {
        let g = Arc::new(Grid::unit_torus(2, 32).unwrap());
        let a = random_field(&g, 4, 1).unwrap();
        let b = random_field(&g, 4, 1).unwrap();
        let c = random_field(&g, 4, 2).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
        assert!(mean(&a).abs() < 1e-12);
    }

    #[test]
    fn random_densities_are_positive_on_boxes() {
        let g = Arc::new(Grid::unit_box(2, 17).unwrap());
        let d = random_density(&g, 3, 5).unwrap();
        assert!(d.values().iter().all(|&v| v > 0.0));
        assert_ne!(d.values(), random_density(&g, 3, 6).unwrap().values());
    }

    #[test]
    fn nyquist_and_periodicity_enforced() {
        let g = Arc::new(Grid::unit_torus(2, 8).unwrap());
        assert!(random_field(&g, 4, 0).is_err());
        assert!(random_field(&g, 3, 0).is_ok());
        assert!(random_field(&g, 0, 0).is_err());
        let b = Arc::new(Grid::unit_box(2, 9).unwrap());
        assert!(random_field(&b, 2, 0).is_err());
    }
}
