//! Young's inequality for the truncated Riesz potential
//! `ω̃(x) = ∫_{|x−y|≤d} ω(y) |x−y|^{1−n} dy`:
//! `‖ω̃‖_{L^n} ≤ ‖K‖_{L^s} ‖ω‖_{L^q}` with `1/s = 1 + 1/n − 1/q`.

use std::sync::Arc;

use poincare_lab::riesz::{riesz_potential, young_check, RieszKernelSpec};
use poincare_lab::search::random_density;
use poincare_lab::{Density, Grid};

fn main() -> poincare_lab::Result<()> {
    // In one dimension the kernel is the indicator of [−d, d]; with d = 1 and
    // ω ≡ 1 on [0, 1] the potential is identically 1.
    let line = Arc::new(Grid::unit_box(1, 257)?);
    let spec = RieszKernelSpec::new(1, 1.0)?;
    let potential = riesz_potential(&Density::uniform(line)?, &spec)?;
    let dev = potential
        .values()
        .iter()
        .map(|v| (v - 1.0).abs())
        .fold(0.0, f64::max);
    println!("n = 1, uniform: max |ω̃ − 1| = {dev:.2e}");

    let grid = Arc::new(Grid::unit_box(2, 33)?);
    let spec = RieszKernelSpec::new(2, 2f64.sqrt())?;
    let mut densities = vec![
        ("uniform".to_string(), Density::uniform(grid.clone())?),
        (
            "point mass".to_string(),
            Density::point_mass(grid.clone(), grid.len() / 2)?,
        ),
    ];
    for seed in 0..5 {
        densities.push((format!("random {seed}"), random_density(&grid, 3, seed)?));
    }
    println!(
        "{:<12} {:>12} {:>12} {:>8}",
        "density", "‖ω̃‖_2", "bound", "slack"
    );
    for (name, omega) in &densities {
        let r = young_check(omega, 2.0, &spec)?;
        println!(
            "{name:<12} {:>12.6} {:>12.6} {:>8.4}",
            r.lhs, r.rhs, r.slack
        );
    }
    Ok(())
}
