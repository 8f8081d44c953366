//! Searching for near-extremal functions of the ratio against a fixed density.

use std::sync::Arc;

use poincare_lab::inequality::validate_exponents;
use poincare_lab::search::{bump_density, maximize_deficit, BumpSpec};
use poincare_lab::{Density, Grid};

fn main() -> poincare_lab::Result<()> {
    let grid = Arc::new(Grid::unit_torus(2, 48)?);
    let cfg = validate_exponents(2, 2.0, 2.0, 2.0)?;
    for (name, omega) in [
        ("uniform", Density::uniform(grid.clone())?),
        (
            "bump 0.25",
            bump_density(&grid, &BumpSpec::centred(&grid, 0.25))?,
        ),
    ] {
        let out = maximize_deficit(&omega, &cfg, 4, 200, 3)?;
        println!(
            "{name:<10} start {:.6} -> best {:.6} after {} steps",
            out.trace[0], out.report.ratio, out.iterations
        );
    }
    Ok(())
}
