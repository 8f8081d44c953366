//! Config-driven experiment runner behind the `poincare-lab` binary.
//!
//! See [`config`] for the file format. Every command writes `<out>.csv`,
//! `<out>.json` and `<out>.manifest.txt`.

pub mod config;
mod run;
pub mod verify;

pub use config::{Command, ExperimentConfig};
pub use run::{
    execute, exit_code, main_from_args, midpoint_node, run, Artifacts, RunSummary, THREADS_ENV,
};
