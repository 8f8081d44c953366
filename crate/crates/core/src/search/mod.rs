//! Adversarial families and the scaling sweep: concentrating bump densities,
//! random trigonometric trial functions, ascent on the ratio, and log-log
//! regression of the sweep results.

mod ascent;
mod bump;
mod fit;
mod sweep;
mod trig;

pub use ascent::{maximize_deficit, AscentOutcome};
pub use bump::{bump_density, BumpProfile, BumpSpec};
pub use fit::{fit_loglog, fit_power_law, FitResult};
pub use sweep::{sweep, sweep_csv, sweep_density, SweepColumn, SweepRecord, SWEEP_CSV_HEADER};
pub use trig::{random_density, random_field, wave_vectors, TrigPolynomial};
