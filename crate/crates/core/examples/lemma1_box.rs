//! The direct inequality on the unit square, `∫|f − E_ω f|^t ≤ c ‖ω‖_q ‖df‖_p^t`.
//!
//! For `f = x`, `ω ≡ 1` and `p = q = 2` (so `t = 1`) the implied constant is
//! `∫|x − 1/2| = 1/4`. Random pairs show the constant stays bounded.

use std::sync::Arc;

use poincare_lab::inequality::{lemma1_check, validate_exponents};
use poincare_lab::search::{random_density, TrigPolynomial};
use poincare_lab::{Density, Grid, ScalarField};

fn main() -> poincare_lab::Result<()> {
    let grid = Arc::new(Grid::unit_box(2, 65)?);
    let cfg = validate_exponents(2, 2.0, 2.0, 2.0)?;

    let x = ScalarField::from_fn(grid.clone(), |p| p[0])?;
    let reference = lemma1_check(&x, &Density::uniform(grid.clone())?, &cfg)?;
    println!(
        "f = x, uniform: implied c = {:.6} (exact 0.25)",
        reference.implied_c
    );

    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let f = TrigPolynomial::random(grid.lengths(), 3, 2 * seed)?.sample(&grid)?;
        let omega = random_density(&grid, 3, 2 * seed + 1)?;
        let report = lemma1_check(&f, &omega, &cfg)?;
        worst = worst.max(report.implied_c);
    }
    println!("largest implied c over 20 random pairs: {worst:.6}");
    Ok(())
}
