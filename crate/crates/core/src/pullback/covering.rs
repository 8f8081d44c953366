use std::sync::Arc;

use crate::calculus::{lp_norm, pairwise_sum, weighted_mean};
use crate::error::{LabError, Result};
use crate::grid::{ensure_same_grid, Density, Grid, ScalarField, MAX_DIM};

/// Covering map `Ψ(x) = x mod 1` from the flat torus `Π [0, w_i)` onto the
/// unit torus `[0,1)^n`.
///
/// The source carries `w_i·m_i` nodes per axis, so `Ψ` maps nodes onto nodes
/// by wrapping indices. Every fiber has `Π w_i` points and `|det dΨ| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringMapSpec {
    wraps: Vec<usize>,
    target: Arc<Grid>,
    source: Arc<Grid>,
}

impl CoveringMapSpec {
    pub fn new(target_nodes: &[usize], wraps: &[usize]) -> Result<Self> {
        if target_nodes.len() != wraps.len() {
            return Err(LabError::InvalidArgument(format!(
                "{} axes but {} wrap factors",
                target_nodes.len(),
                wraps.len()
            )));
        }
        if let Some(w) = wraps.iter().find(|&&w| w == 0) {
            return Err(LabError::InvalidArgument(format!(
                "wrap factors must be positive, got {w}"
            )));
        }
        let n = target_nodes.len();
        let target = Grid::torus(target_nodes, &vec![1.0; n])?;
        let source_nodes: Vec<usize> = target_nodes.iter().zip(wraps).map(|(m, w)| m * w).collect();
        let source_lengths: Vec<f64> = wraps.iter().map(|&w| w as f64).collect();
        let source = Grid::torus(&source_nodes, &source_lengths)?;
        Ok(CoveringMapSpec {
            wraps: wraps.to_vec(),
            target: Arc::new(target),
            source: Arc::new(source),
        })
    }

    /// Covering of the unit torus underlying `target`, which must be a unit flat torus.
    pub fn over(target: &Grid, wraps: &[usize]) -> Result<Self> {
        if !target.is_torus() || target.lengths().iter().any(|&l| l != 1.0) {
            return Err(LabError::InvalidGrid(
                "covering maps target the unit flat torus".into(),
            ));
        }
        CoveringMapSpec::new(target.nodes(), wraps)
    }

    pub fn wraps(&self) -> &[usize] {
        &self.wraps
    }

    pub fn target(&self) -> &Arc<Grid> {
        &self.target
    }

    pub fn source(&self) -> &Arc<Grid> {
        &self.source
    }

    /// Fiber cardinality `Π w_i`.
    pub fn sheets(&self) -> usize {
        self.wraps.iter().product()
    }

    /// `|det dΨ|`, identically one for integer wraps.
    pub fn jacobian(&self) -> f64 {
        1.0
    }

    /// Target node hit by source node `k`.
    pub fn project(&self, k: usize) -> usize {
        let mut idx = self.source.unravel(k);
        for (axis, i) in idx.iter_mut().enumerate().take(self.target.dim()) {
            *i %= self.target.nodes()[axis];
        }
        self.target.ravel(&idx[..self.target.dim()])
    }

    /// Source nodes above target node `y`, in increasing order.
    pub fn fiber(&self, y: usize) -> Vec<usize> {
        let n = self.target.dim();
        let base = self.target.unravel(y);
        let mut out = Vec::with_capacity(self.sheets());
        let mut sheet = [0usize; MAX_DIM];
        loop {
            let mut idx = [0usize; MAX_DIM];
            for axis in 0..n {
                idx[axis] = base[axis] + sheet[axis] * self.target.nodes()[axis];
            }
            out.push(self.source.ravel(&idx[..n]));
            // odometer over sheets, last axis fastest
            let mut axis = n;
            loop {
                if axis == 0 {
                    out.sort_unstable();
                    return out;
                }
                axis -= 1;
                sheet[axis] += 1;
                if sheet[axis] < self.wraps[axis] {
                    break;
                }
                sheet[axis] = 0;
            }
        }
    }
}

/// `f̃ = f ∘ Ψ`, by exact index arithmetic.
pub fn pullback_field(f: &ScalarField, spec: &CoveringMapSpec) -> Result<ScalarField> {
    ensure_same_grid(f.grid(), &spec.target)?;
    let values = (0..spec.source.len())
        .map(|k| f.values()[spec.project(k)])
        .collect();
    ScalarField::new(spec.source.clone(), values)
}

/// `ω̃ = |det dΨ| · ω∘Ψ / #Ψ⁻¹(Ψ(x))`, a density on the source.
pub fn pullback_density(omega: &Density, spec: &CoveringMapSpec) -> Result<Density> {
    let scale = spec.jacobian() / spec.sheets() as f64;
    let lifted = pullback_field(omega.field(), spec)?.map(|v| v * scale)?;
    Density::new(lifted)
}

/// Both sides of the coarea identity `∫_B h = ∫_M Σ_{x∈Ψ⁻¹(y)} h(x)/|det dΨ_x| dμ(y)`.
pub fn coarea_check(h: &ScalarField, spec: &CoveringMapSpec) -> Result<(f64, f64)> {
    ensure_same_grid(h.grid(), &spec.source)?;
    let lhs = crate::calculus::integral(h);
    let pushed: Vec<f64> = (0..spec.target.len())
        .map(|y| {
            let terms: Vec<f64> = spec
                .fiber(y)
                .into_iter()
                .map(|x| h.values()[x] / spec.jacobian())
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    let rhs = crate::calculus::weighted_sum(spec.target.weights(), &pushed);
    Ok((lhs, rhs))
}

/// `(E_ω̃[f̃], E_ω[f])`, equal for every covering map.
pub fn pullback_mean_check(
    f: &ScalarField,
    omega: &Density,
    spec: &CoveringMapSpec,
) -> Result<(f64, f64)> {
    let lifted_f = pullback_field(f, spec)?;
    let lifted_omega = pullback_density(omega, spec)?;
    Ok((
        weighted_mean(&lifted_f, &lifted_omega)?,
        weighted_mean(f, omega)?,
    ))
}

/// `(‖ω̃‖_{L^q}, ‖ω‖_{L^q})`; the first equals `(Π w)^{1/q − 1}` times the second.
pub fn pullback_lq_check(omega: &Density, q: f64, spec: &CoveringMapSpec) -> Result<(f64, f64)> {
    if !(q > 1.0) {
        return Err(LabError::InvalidExponent(format!("need q > 1, got {q}")));
    }
    let lifted = pullback_density(omega, spec)?;
    Ok((lp_norm(lifted.field(), q)?, lp_norm(omega.field(), q)?))
}

/// `(Π w)^{1/q − 1}`, the exact `L^q` scaling of the pulled-back density.
pub fn lq_scaling(spec: &CoveringMapSpec, q: f64) -> f64 {
    (spec.sheets() as f64).powf(1.0 / q - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::integral;
    use std::f64::consts::PI;

    #[test]
    fn fibers_partition_the_source() {
        let spec = CoveringMapSpec::new(&[4, 3], &[2, 3]).unwrap();
        assert_eq!(spec.sheets(), 6);
        let mut seen = vec![0usize; spec.source().len()];
        for y in 0..spec.target().len() {
            let fiber = spec.fiber(y);
            assert_eq!(fiber.len(), 6);
            for x in fiber {
                assert_eq!(spec.project(x), y);
                seen[x] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn pullback_of_sine_is_periodic_extension() {
        let spec = CoveringMapSpec::new(&[16], &[2]).unwrap();
        let f = ScalarField::from_fn(spec.target().clone(), |x| (2.0 * PI * x[0]).sin()).unwrap();
        let lifted = pullback_field(&f, &spec).unwrap();
        for k in 0..spec.source().len() {
            let x = spec.source().point(k)[0];
            assert!((lifted.values()[k] - (2.0 * PI * x).sin()).abs() < 1e-12);
        }
        let c = ScalarField::constant(spec.target().clone(), 2.5).unwrap();
        assert!(pullback_field(&c, &spec)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 2.5));
    }

    #[test]
    fn wraps_compose() {
        let m = 5;
        let f = ScalarField::from_fn(Arc::new(Grid::unit_torus(1, m).unwrap()), |x| x[0] * x[0])
            .unwrap();
        let two = CoveringMapSpec::new(&[m], &[2]).unwrap();
        let lifted_once = pullback_field(&f, &two).unwrap();
        // the w = 2 source is a length-2 torus; rescale its coordinates to reuse it as a target
        let as_unit = ScalarField::new(
            Arc::new(Grid::unit_torus(1, 2 * m).unwrap()),
            lifted_once.values().to_vec(),
        )
        .unwrap();
        let three = CoveringMapSpec::new(&[2 * m], &[3]).unwrap();
        let twice = pullback_field(&as_unit, &three).unwrap();
        let six = pullback_field(&f, &CoveringMapSpec::new(&[m], &[6]).unwrap()).unwrap();
        assert_eq!(twice.values(), six.values());
    }

    #[test]
    fn uniform_density_splits_evenly() {
        let spec = CoveringMapSpec::new(&[8], &[2]).unwrap();
        let lifted =
            pullback_density(&Density::uniform(spec.target().clone()).unwrap(), &spec).unwrap();
        assert!(lifted.values().iter().all(|&v| v == 0.5));
        assert!((integral(lifted.field()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn point_mass_splits_over_the_fiber() {
        let spec = CoveringMapSpec::new(&[4, 4], &[2, 3]).unwrap();
        let y = 5;
        let omega = Density::point_mass(spec.target().clone(), y).unwrap();
        let lifted = pullback_density(&omega, &spec).unwrap();
        let fiber = spec.fiber(y);
        let w = spec.source().weights()[0];
        for k in 0..spec.source().len() {
            let mass = lifted.values()[k] * w;
            if fiber.contains(&k) {
                assert!((mass - 1.0 / 6.0).abs() < 1e-14);
            } else {
                assert_eq!(mass, 0.0);
            }
        }
    }

    #[test]
    fn coarea_affine_example() {
        let spec = CoveringMapSpec::new(&[64], &[2]).unwrap();
        let h = ScalarField::from_fn(spec.source().clone(), |x| x[0]).unwrap();
        let (lhs, rhs) = coarea_check(&h, &spec).unwrap();
        // equispaced left sums of x on [0,2) and of y + (y+1) on [0,1)
        let exact = 2.0 - 1.0 / 64.0;
        assert!((lhs - exact).abs() < 1e-12);
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
        let one = ScalarField::constant(spec.source().clone(), 1.0).unwrap();
        let (a, b) = coarea_check(&one, &spec).unwrap();
        assert!((a - 2.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);
    }

    #[test]
    fn lq_scaling_examples() {
        let spec = CoveringMapSpec::new(&[32], &[2]).unwrap();
        let omega = Density::uniform(spec.target().clone()).unwrap();
        let (lhs, rhs) = pullback_lq_check(&omega, 2.0, &spec).unwrap();
        assert!((lhs - 0.5_f64.sqrt() * rhs).abs() < 1e-14);
        let identity = CoveringMapSpec::new(&[32], &[1]).unwrap();
        let (lhs, rhs) = pullback_lq_check(&omega, 3.0, &identity).unwrap();
        assert_eq!(lhs, rhs);
        assert!(pullback_lq_check(&omega, 1.0, &spec).is_err());
    }

    #[test]
    fn rejects_foreign_grids() {
        let spec = CoveringMapSpec::new(&[8], &[2]).unwrap();
        let other = ScalarField::constant(Arc::new(Grid::unit_torus(1, 9).unwrap()), 1.0).unwrap();
        assert!(pullback_field(&other, &spec).is_err());
        assert!(coarea_check(&other, &spec).is_err());
        assert!(CoveringMapSpec::new(&[8], &[0]).is_err());
    }
}
