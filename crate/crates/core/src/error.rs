use std::fmt;

use thiserror::Error;

/// One of the three hypotheses on `(n, p, q, r)` under which the weighted
/// Poincaré inequality holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisViolation {
    /// `p > 1` and `p >= n/(n-1)`.
    PTooSmall,
    /// `q > 1` and `q > n/2`.
    QTooSmall,
    /// `r > 1` and, when `p < n`, `1/r >= 1/p - 1/n`.
    RIncompatible,
}

impl HypothesisViolation {
    /// Stable snake_case identifier, used in reports and exit messages.
    pub fn code(&self) -> &'static str {
        match self {
            HypothesisViolation::PTooSmall => "p_too_small",
            HypothesisViolation::QTooSmall => "q_too_small",
            HypothesisViolation::RIncompatible => "r_incompatible",
        }
    }
}

impl fmt::Display for HypothesisViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Error)]
pub enum LabError {
    /// A Poincaré hypothesis failed; `detail` names the inequality, e.g. `q > n/2 failed`.
    #[error("{kind}: {detail}")]
    Hypothesis {
        kind: HypothesisViolation,
        detail: String,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value {value} at node {node}")]
    NonFinite { node: usize, value: f64 },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("constant field: gradient norm is zero")]
    ConstantField,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("disconnected incidence graph: {reached} of {total} balls reachable from ball 0")]
    Disconnected { reached: usize, total: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub(crate) fn hypothesis(kind: HypothesisViolation, detail: impl Into<String>) -> Self {
        LabError::Hypothesis {
            kind,
            detail: detail.into(),
        }
    }

    /// True for rejections of the inequality's hypotheses (exit code 2 in the runner).
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(self, LabError::Hypothesis { .. })
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
