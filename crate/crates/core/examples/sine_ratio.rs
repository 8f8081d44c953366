//! Ratio of the weighted Poincaré inequality for `sin(2πx)` on the unit torus.
//!
//! With `ω ≡ 1` and `p = q = r = 2` the ratio is exactly `1/(2π)`.
//!
//! ```text
//! cargo run --example sine_ratio -- 128
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use poincare_lab::inequality::{ratio_report, validate_exponents};
use poincare_lab::{Density, Grid, ScalarField};

fn main() -> poincare_lab::Result<()> {
    let m = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(128);
    let grid = Arc::new(Grid::unit_torus(2, m)?);
    let f = ScalarField::from_fn(grid.clone(), |x| (2.0 * PI * x[0]).sin())?;
    let omega = Density::uniform(grid)?;
    let cfg = validate_exponents(2, 2.0, 2.0, 2.0)?;

    let report = ratio_report(&f, &omega, &cfg)?;
    println!("m = {m}");
    println!("deficit      {:.10}", report.deficit);
    println!("|df|_2       {:.10}", report.grad_p_norm);
    println!("ratio        {:.10}", report.ratio);
    println!("1/(2π)       {:.10}", 1.0 / (2.0 * PI));
    println!(
        "error        {:.3e}",
        (report.ratio - 1.0 / (2.0 * PI)).abs()
    );
    Ok(())
}
