//! Runs an experiment config in-process, the way the binary does.
//!
//! ```text
//! cargo run --example run_config -- configs/ratio.toml
//! ```

use poincare_lab::lab::{run, ExperimentConfig};

fn main() -> poincare_lab::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "configs/ratio.toml".to_string());
    let (cfg, text) = ExperimentConfig::load(&path)?;
    let summary = run(&cfg, &text)?;
    print!("{}", summary.artifacts.summary);
    println!("{}", serde_json::to_string_pretty(&summary.artifacts.json)?);
    Ok(())
}
