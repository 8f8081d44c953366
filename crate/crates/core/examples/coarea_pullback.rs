//! Pulling functions and densities back along a covering of the unit torus.
//!
//! The wrap map `x ↦ x mod 1` from a `w₁ × w₂` torus is a local isometry, so
//! integrals split over fibres, weighted means are preserved, and the `L^q`
//! norm of the pulled-back density scales by `(w₁w₂)^{1/q − 1}`.

use std::sync::Arc;

use poincare_lab::pullback::{
    coarea_check, lq_scaling, pullback_lq_check, pullback_mean_check, CoveringMapSpec,
};
use poincare_lab::search::{random_density, random_field};
use poincare_lab::Grid;

fn main() -> poincare_lab::Result<()> {
    let target = Grid::unit_torus(2, 32)?;
    for wraps in [vec![2, 1], vec![3, 1], vec![2, 2], vec![2, 3]] {
        let spec = CoveringMapSpec::over(&target, &wraps)?;
        let target: &Arc<Grid> = spec.target();
        let h = random_field(spec.source(), 3, 1)?.map(f64::exp)?;
        let f = random_field(target, 3, 2)?;
        let omega = random_density(target, 3, 3)?;

        let (lhs, rhs) = coarea_check(&h, &spec)?;
        let (lifted_mean, mean) = pullback_mean_check(&f, &omega, &spec)?;
        let (lifted_norm, norm) = pullback_lq_check(&omega, 3.0, &spec)?;
        println!(
            "wraps {wraps:?}: coarea {:.1e}, mean {:.1e}, L^3 ratio {:.12} (expected {:.12})",
            (lhs - rhs).abs() / lhs.abs(),
            (lifted_mean - mean).abs(),
            lifted_norm / norm,
            lq_scaling(&spec, 3.0)
        );
    }
    Ok(())
}
