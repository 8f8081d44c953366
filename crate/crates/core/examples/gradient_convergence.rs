//! Second-order convergence of the central-difference gradient.
//!
//! Prints the max-node error of `d/dx sin(2πx)` on periodic grids and on
//! boxes (one-sided stencils at the walls); each halving of `h` should cut
//! the error by about four.

use std::f64::consts::PI;
use std::sync::Arc;

use poincare_lab::calculus::gradient;
use poincare_lab::{Grid, ScalarField};

fn max_error(grid: Grid) -> poincare_lab::Result<f64> {
    let grid = Arc::new(grid);
    let f = ScalarField::from_fn(grid.clone(), |x| (2.0 * PI * x[0]).sin())?;
    let df = gradient(&f)?;
    Ok((0..grid.len())
        .map(|k| {
            let x = grid.point(k)[0];
            (df.at(k)[0] - 2.0 * PI * (2.0 * PI * x).cos()).abs()
        })
        .fold(0.0, f64::max))
}

fn main() -> poincare_lab::Result<()> {
    println!(
        "{:>6} {:>14} {:>8} {:>14} {:>8}",
        "m", "torus", "ratio", "box", "ratio"
    );
    let mut prev: Option<(f64, f64)> = None;
    for m in [16, 32, 64, 128, 256] {
        let t = max_error(Grid::unit_torus(1, m)?)?;
        let b = max_error(Grid::unit_box(1, m + 1)?)?;
        let (rt, rb) = prev.map_or((f64::NAN, f64::NAN), |(pt, pb)| (pt / t, pb / b));
        println!("{m:>6} {t:>14.6e} {rt:>8.3} {b:>14.6e} {rb:>8.3}");
        prev = Some((t, b));
    }
    Ok(())
}
