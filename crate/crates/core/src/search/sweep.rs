use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{Density, Grid};
use crate::inequality::ExponentConfig;

use super::ascent::maximize_deficit;
use super::bump::{bump_density, BumpSpec};

/// Header of the sweep CSV.
pub const SWEEP_CSV_HEADER: &str =
    "eps,omega_q_norm,best_deficit,best_ratio,ascent_iterations,seed";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub eps: f64,
    pub omega_q_norm: f64,
    pub best_deficit: f64,
    pub best_ratio: f64,
    pub ascent_iterations: usize,
    pub seed: u64,
}

/// Numeric columns of a [`SweepRecord`], for regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepColumn {
    Eps,
    OmegaQNorm,
    BestDeficit,
    BestRatio,
}

impl SweepColumn {
    pub fn get(&self, record: &SweepRecord) -> f64 {
        match self {
            SweepColumn::Eps => record.eps,
            SweepColumn::OmegaQNorm => record.omega_q_norm,
            SweepColumn::BestDeficit => record.best_deficit,
            SweepColumn::BestRatio => record.best_ratio,
        }
    }
}

impl FromStr for SweepColumn {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eps" => Ok(SweepColumn::Eps),
            "omega_q_norm" => Ok(SweepColumn::OmegaQNorm),
            "best_deficit" => Ok(SweepColumn::BestDeficit),
            "best_ratio" => Ok(SweepColumn::BestRatio),
            other => Err(LabError::InvalidArgument(format!(
                "unknown sweep column {other:?}"
            ))),
        }
    }
}

/// Density used at one sweep level: the uniform density once `eps` reaches
/// half the shortest side, otherwise a cos² bump at the domain midpoint.
pub fn sweep_density(grid: &Arc<Grid>, eps: f64) -> Result<Density> {
    let half = 0.5 * grid.lengths().iter().cloned().fold(f64::INFINITY, f64::min);
    if eps >= half * (1.0 - 1e-12) {
        Density::uniform(grid.clone())
    } else {
        bump_density(grid, &BumpSpec::centred(grid, eps))
    }
}

/// Runs [`maximize_deficit`] against a family of shrinking bumps.
///
/// Record `i` uses seed `seed + i`; levels run in parallel and the output
/// does not depend on the thread count.
pub fn sweep(
    cfg: &ExponentConfig,
    grid: &Arc<Grid>,
    eps_list: &[f64],
    max_freq: usize,
    budget: usize,
    seed: u64,
) -> Result<Vec<SweepRecord>> {
    if eps_list.is_empty() {
        return Err(LabError::InvalidArgument("empty eps list".into()));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(LabError::InvalidArgument(
            "eps list must be strictly decreasing".into(),
        ));
    }
    let densities = eps_list
        .iter()
        .map(|&eps| sweep_density(grid, eps))
        .collect::<Result<Vec<_>>>()?;
    densities
        .par_iter()
        .zip(eps_list.par_iter())
        .enumerate()
        .map(|(i, (omega, &eps))| {
            let record_seed = seed.wrapping_add(i as u64);
            let out = maximize_deficit(omega, cfg, max_freq, budget, record_seed)?;
            Ok(SweepRecord {
                eps,
                omega_q_norm: out.report.omega_q_norm,
                best_deficit: out.report.deficit,
                best_ratio: out.report.ratio,
                ascent_iterations: out.iterations,
                seed: record_seed,
            })
        })
        .collect()
}

pub fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.eps, r.omega_q_norm, r.best_deficit, r.best_ratio, r.ascent_iterations, r.seed
        );
    }
    out
}
