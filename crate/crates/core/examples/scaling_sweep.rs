//! How the best deficit grows as the density concentrates.
//!
//! Runs the deficit ascent against cos² bumps of halving width and fits
//! `log deficit` against `log ‖ω‖_{L²}`; the slope stays below `α = 1`.

use std::sync::Arc;

use poincare_lab::inequality::validate_exponents;
use poincare_lab::search::{fit_loglog, sweep, sweep_csv, SweepColumn};
use poincare_lab::Grid;

fn main() -> poincare_lab::Result<()> {
    let m = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(64);
    let grid = Arc::new(Grid::unit_torus(2, m)?);
    let cfg = validate_exponents(2, 2.0, 2.0, 2.0)?;
    let eps = [0.5, 0.25, 0.125, 0.0625, 0.03125];

    let records = sweep(&cfg, &grid, &eps, 4, 200, 7)?;
    print!("{}", sweep_csv(&records));
    let fit = fit_loglog(&records, SweepColumn::OmegaQNorm, SweepColumn::BestDeficit)?;
    println!(
        "slope {:.4}, intercept {:.4}, max residual {:.4}",
        fit.slope, fit.intercept, fit.max_abs_residual
    );
    Ok(())
}
