//! Experiment configuration files.
//!
//! A config is a TOML document: top-level `command`, `seed`, `out` and
//! `threads` keys, an `[exponents]` and a `[grid]` section, and one optional
//! section per command. Relative paths inside the file resolve against the
//! file's own directory.
//!
//! ```toml
//! command = "sweep"
//! seed = 7
//! out = "results/sweep"
//!
//! [exponents]
//! n = 2
//! p = 2.0
//! q = 2.0
//! r = 2.0          # `inf` is accepted
//!
//! [grid]
//! m = [64, 64]
//! lengths = [1.0, 1.0]      # default: unit side
//! periodic = [true, true]   # default depends on the command
//!
//! [sweep]
//! eps = [0.5, 0.25, 0.125, 0.0625, 0.03125]
//! max_freq = 4
//! budget = 200
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::Grid;
use crate::inequality::{validate_exponents, ExponentConfig};
use crate::search::SweepColumn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Verify,
    Ratio,
    Lemma1,
    Young,
    Coarea,
    Cover,
    Sweep,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Verify,
        Command::Ratio,
        Command::Lemma1,
        Command::Young,
        Command::Coarea,
        Command::Cover,
        Command::Sweep,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Ratio => "ratio",
            Command::Lemma1 => "lemma1",
            Command::Young => "young",
            Command::Coarea => "coarea",
            Command::Cover => "cover",
            Command::Sweep => "sweep",
        }
    }

    /// Grid periodicity assumed when `[grid].periodic` is omitted.
    fn default_periodic(&self) -> bool {
        !matches!(self, Command::Lemma1 | Command::Young)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| LabError::Config(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentsSection {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub m: Vec<usize>,
    pub lengths: Option<Vec<f64>>,
    pub periodic: Option<Vec<bool>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldPreset {
    /// `sin(2π x_0 / L_0)`.
    #[default]
    Sin,
    /// `x_0`.
    X,
    /// Random trigonometric polynomial.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityPreset {
    #[default]
    Uniform,
    /// Centred cos² bump of width `eps`.
    Bump,
    /// Normalized `exp` of a random trigonometric polynomial.
    Random,
    /// All mass at the node nearest the domain midpoint.
    PointMass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatioSection {
    pub field: FieldPreset,
    pub density: DensityPreset,
    pub eps: f64,
    pub max_freq: usize,
}

impl Default for RatioSection {
    fn default() -> Self {
        RatioSection {
            field: FieldPreset::Sin,
            density: DensityPreset::Uniform,
            eps: 0.25,
            max_freq: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lemma1Section {
    /// Random `(f, ω)` pairs evaluated after the affine reference case.
    pub samples: usize,
    pub max_freq: usize,
}

impl Default for Lemma1Section {
    fn default() -> Self {
        Lemma1Section {
            samples: 50,
            max_freq: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct YoungSection {
    /// Defaults to `[exponents].q`.
    pub q: Option<f64>,
    /// Truncation radius; defaults to the grid diameter.
    pub d: Option<f64>,
    /// Random densities checked in addition to the uniform and point-mass ones.
    pub densities: usize,
    pub max_freq: usize,
}

impl Default for YoungSection {
    fn default() -> Self {
        YoungSection {
            q: None,
            d: None,
            densities: 20,
            max_freq: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoareaSection {
    pub wraps: Vec<usize>,
    pub fields: usize,
    pub max_freq: usize,
}

impl Default for CoareaSection {
    fn default() -> Self {
        CoareaSection {
            wraps: Vec::new(),
            fields: 20,
            max_freq: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoverSection {
    /// Point-cloud CSV; when absent, `random_points` uniform points on the `[grid]` torus are used.
    pub points: Option<PathBuf>,
    pub random_points: usize,
    pub radius: f64,
}

impl Default for CoverSection {
    fn default() -> Self {
        CoverSection {
            points: None,
            random_points: 500,
            radius: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub eps: Vec<f64>,
    pub max_freq: usize,
    pub budget: usize,
    pub x_key: SweepColumn,
    pub y_key: SweepColumn,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            eps: vec![0.5, 0.25, 0.125, 0.0625, 0.03125],
            max_freq: 4,
            budget: 200,
            x_key: SweepColumn::OmegaQNorm,
            y_key: SweepColumn::BestDeficit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    /// Output path prefix.
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Worker threads; `POINCARE_LAB_THREADS` overrides, default is all cores.
    pub threads: Option<usize>,
    pub exponents: Option<ExponentsSection>,
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub ratio: RatioSection,
    #[serde(default)]
    pub lemma1: Lemma1Section,
    #[serde(default)]
    pub young: YoungSection,
    #[serde(default)]
    pub coarea: CoareaSection,
    #[serde(default)]
    pub cover: CoverSection,
    #[serde(default)]
    pub sweep: SweepSection,
    /// Directory relative paths resolve against; set by [`ExperimentConfig::load`].
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_out() -> PathBuf {
    PathBuf::from("poincare-lab")
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    /// Reads and parses a config file; relative paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<(Self, String)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = ExperimentConfig::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((cfg, text))
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn exponents_section(&self) -> Result<ExponentsSection> {
        self.exponents
            .ok_or_else(|| LabError::Config("missing [exponents] section".into()))
    }

    /// Validated exponents; hypothesis failures surface as [`LabError::Hypothesis`].
    pub fn exponent_config(&self) -> Result<ExponentConfig> {
        let e = self.exponents_section()?;
        validate_exponents(e.n, e.p, e.q, e.r)
    }

    pub fn build_grid(&self) -> Result<Arc<Grid>> {
        let section = self
            .grid
            .as_ref()
            .ok_or_else(|| LabError::Config("missing [grid] section".into()))?;
        let n = section.m.len();
        let lengths = section.lengths.clone().unwrap_or_else(|| vec![1.0; n]);
        let periodic = section
            .periodic
            .clone()
            .unwrap_or_else(|| vec![self.command.default_periodic(); n]);
        Ok(Arc::new(Grid::new(n, &section.m, &lengths, &periodic)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_sweep() {
        let cfg = ExperimentConfig::parse(
            r#"
            command = "sweep"
            [exponents]
            n = 2
            p = 2.0
            q = 2.0
            r = inf
            [grid]
            m = [16, 16]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.command, Command::Sweep);
        assert!(cfg.exponents.unwrap().r.is_infinite());
        assert_eq!(cfg.sweep.budget, 200);
        assert!(cfg.build_grid().unwrap().is_torus());
    }

    #[test]
    fn rejects_unknown_keys_and_commands() {
        assert!(ExperimentConfig::parse("command = \"dance\"").is_err());
        assert!(ExperimentConfig::parse("command = \"verify\"\nbogus = 1").is_err());
        assert!("sweep".parse::<Command>().is_ok());
        assert!("nope".parse::<Command>().is_err());
    }

    #[test]
    fn box_commands_default_to_non_periodic() {
        let cfg = ExperimentConfig::parse("command = \"young\"\n[grid]\nm = [9, 9]").unwrap();
        assert!(cfg.build_grid().unwrap().is_box());
    }
}
