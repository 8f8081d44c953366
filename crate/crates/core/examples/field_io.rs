//! Grids, fields and densities, and their CSV round trip.

use std::sync::Arc;

use poincare_lab::calculus::{integral, lp_norm, weighted_mean};
use poincare_lab::search::random_density;
use poincare_lab::{Grid, ScalarField};

fn main() -> poincare_lab::Result<()> {
    // Periodic in x, walls in y.
    let grid = Arc::new(Grid::new(2, &[8, 5], &[2.0, 1.0], &[true, false])?);
    println!("x nodes {:?}", grid.axis_coordinates(0));
    println!("y nodes {:?}", grid.axis_coordinates(1));
    println!(
        "volume {} = sum of weights {}",
        grid.volume(),
        grid.quadrature().total()
    );

    let f = ScalarField::from_fn(grid.clone(), |x| x[0] + x[1] * x[1])?;
    let omega = random_density(&grid, 2, 0)?;
    println!(
        "∫f = {:.6}, |f|_2 = {:.6}, E_ω[f] = {:.6}",
        integral(&f),
        lp_norm(&f, 2.0)?,
        weighted_mean(&f, &omega)?
    );

    let text = f.to_csv();
    println!("{}", text.lines().next().unwrap_or_default());
    let back = ScalarField::from_csv(&text)?;
    assert_eq!(back.values(), f.values());
    println!("round trip ok ({} values)", back.len());
    Ok(())
}
