//! Exponent arithmetic and the inequality functionals.
//!
//! The weighted Poincaré inequality under test reads
//!
//! ```text
//! ‖f − E_ω[f]‖_{L^r} ≤ C ‖ω‖_{L^q}^α ‖df‖_{L^p},   α = n/((n−1)p),
//! ```
//!
//! for `p, q ∈ (1,∞)` with `p ≥ n/(n−1)`, `q > n/2`, `r ∈ (1,∞]` and
//! `1/r ≥ 1/p − 1/n` whenever `p < n`. [`ratio`] measures the left side
//! divided by the right side without `C`.

use serde::{Deserialize, Serialize};

use crate::calculus::{gradient, gradient_lp_norm, lp_norm, lp_norm_values, weighted_mean};
use crate::error::{HypothesisViolation, LabError, Result};
use crate::grid::{ensure_same_grid, Density, ScalarField};

/// Relative slack used when deciding the boundary cases of the hypotheses.
const BOUNDARY_TOL: f64 = 1e-12;

/// A validated exponent tuple with its derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentConfig {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    /// May be `f64::INFINITY`.
    pub r: f64,
    /// `(n−1)p/n`, the exponent of the direct box inequality.
    pub t: f64,
    /// `n/((n−1)p) = 1/t`, the power of `‖ω‖_{L^q}`.
    pub alpha: f64,
    /// Sobolev conjugate of `p`; may be `f64::INFINITY`.
    pub p_prime: f64,
}

/// Checks `(n, p, q, r)` against the hypotheses and derives `t`, `α`, `p′`.
pub fn validate_exponents(n: usize, p: f64, q: f64, r: f64) -> Result<ExponentConfig> {
    if n == 0 {
        return Err(LabError::InvalidArgument("dimension must be >= 1".into()));
    }
    let nf = n as f64;
    if !(p > 1.0 && p.is_finite()) {
        return Err(LabError::hypothesis(
            HypothesisViolation::PTooSmall,
            format!("p in (1, inf) failed (p = {p})"),
        ));
    }
    // p ≥ n/(n−1) ⇔ p(n−1) ≥ n; vacuous-false at n = 1.
    if n == 1 || p * (nf - 1.0) < nf * (1.0 - BOUNDARY_TOL) {
        return Err(LabError::hypothesis(
            HypothesisViolation::PTooSmall,
            format!("p >= n/(n-1) failed (n = {n}, p = {p})"),
        ));
    }
    if !(q > 1.0 && q.is_finite()) {
        return Err(LabError::hypothesis(
            HypothesisViolation::QTooSmall,
            format!("q in (1, inf) failed (q = {q})"),
        ));
    }
    if 2.0 * q <= nf {
        return Err(LabError::hypothesis(
            HypothesisViolation::QTooSmall,
            format!("q > n/2 failed (n = {n}, q = {q})"),
        ));
    }
    if r.is_nan() || r <= 1.0 {
        return Err(LabError::hypothesis(
            HypothesisViolation::RIncompatible,
            format!("r in (1, inf] failed (r = {r})"),
        ));
    }
    // 1/r ≥ 1/p − 1/n ⇔ np ≥ r(n − p) when p < n.
    if p < nf && r.is_finite() && nf * p < r * (nf - p) * (1.0 - BOUNDARY_TOL) {
        return Err(LabError::hypothesis(
            HypothesisViolation::RIncompatible,
            format!("1/r >= 1/p - 1/n failed (n = {n}, p = {p}, r = {r})"),
        ));
    }
    if p < nf && r.is_infinite() {
        return Err(LabError::hypothesis(
            HypothesisViolation::RIncompatible,
            format!("1/r >= 1/p - 1/n failed (n = {n}, p = {p}, r = inf)"),
        ));
    }
    let t = (nf - 1.0) * p / nf;
    Ok(ExponentConfig {
        n,
        p,
        q,
        r,
        t,
        alpha: nf / ((nf - 1.0) * p),
        p_prime: sobolev_conjugate(n, p),
    })
}

/// `np/(n−p)` for `p < n`, `∞` for `p > n`, and `2p` at `p = n`.
pub fn sobolev_conjugate(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    if p < nf {
        nf * p / (nf - p)
    } else if p > nf {
        f64::INFINITY
    } else {
        2.0 * p
    }
}

/// The `θ ∈ (0,1)` with `1/p = θ/t + (1−θ)/p′`.
pub fn interpolation_theta(t: f64, p: f64, p_prime: f64) -> Result<f64> {
    if !(t < p && p < p_prime) || t <= 0.0 {
        return Err(LabError::InvalidArgument(format!(
            "need 0 < t < p < p' (t = {t}, p = {p}, p' = {p_prime})"
        )));
    }
    let inv_pp = if p_prime.is_infinite() {
        0.0
    } else {
        1.0 / p_prime
    };
    Ok((1.0 / p - inv_pp) / (1.0 / t - inv_pp))
}

/// `‖f − E_ω[f]‖_{L^r}`.
pub fn deficit(f: &ScalarField, omega: &Density, r: f64) -> Result<f64> {
    let centre = weighted_mean(f, omega)?;
    let shifted: Vec<f64> = f.values().iter().map(|v| v - centre).collect();
    lp_norm_values(f.grid().weights(), &shifted, r)
}

/// Every term of the ratio, as serialized by the runner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub deficit: f64,
    pub omega_q_norm: f64,
    pub grad_p_norm: f64,
    pub alpha: f64,
    pub ratio: f64,
}

pub fn ratio_report(f: &ScalarField, omega: &Density, cfg: &ExponentConfig) -> Result<RatioReport> {
    ensure_same_grid(f.grid(), omega.grid())?;
    check_dimension(f, cfg)?;
    let grad_p_norm = gradient_lp_norm(&gradient(f)?, cfg.p)?;
    if grad_p_norm == 0.0 {
        return Err(LabError::ConstantField);
    }
    let deficit = deficit(f, omega, cfg.r)?;
    let omega_q_norm = lp_norm(omega.field(), cfg.q)?;
    Ok(RatioReport {
        deficit,
        omega_q_norm,
        grad_p_norm,
        alpha: cfg.alpha,
        ratio: deficit / (omega_q_norm.powf(cfg.alpha) * grad_p_norm),
    })
}

/// `deficit(f, ω, r) / (‖ω‖_{L^q}^α · ‖df‖_{L^p})`.
pub fn ratio(f: &ScalarField, omega: &Density, cfg: &ExponentConfig) -> Result<f64> {
    ratio_report(f, omega, cfg).map(|r| r.ratio)
}

/// Terms of the direct box inequality `∫|f − E_ω f|^t ≤ c ‖ω‖_{L^q} (∫|df|^p)^{t/p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub lhs: f64,
    pub rhs_core: f64,
    /// `lhs / rhs_core`; the constant `c` this pair forces.
    pub implied_c: f64,
}

/// Evaluates the box inequality on a non-periodic grid.
pub fn lemma1_check(
    f: &ScalarField,
    omega: &Density,
    cfg: &ExponentConfig,
) -> Result<Lemma1Report> {
    ensure_same_grid(f.grid(), omega.grid())?;
    check_dimension(f, cfg)?;
    if !f.grid().is_box() {
        return Err(LabError::InvalidGrid(
            "the box inequality needs a convex (non-periodic) domain".into(),
        ));
    }
    let centre = weighted_mean(f, omega)?;
    let lhs = lp_norm_values(
        f.grid().weights(),
        &f.values().iter().map(|v| v - centre).collect::<Vec<_>>(),
        cfg.t,
    )?
    .powf(cfg.t);
    let grad = gradient_lp_norm(&gradient(f)?, cfg.p)?;
    let rhs_core = lp_norm(omega.field(), cfg.q)? * grad.powf(cfg.t);
    let implied_c = if rhs_core > 0.0 {
        lhs / rhs_core
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(Lemma1Report {
        lhs,
        rhs_core,
        implied_c,
    })
}

fn check_dimension(f: &ScalarField, cfg: &ExponentConfig) -> Result<()> {
    if f.grid().dim() != cfg.n {
        Err(LabError::GridMismatch(format!(
            "exponents are for n = {} but the grid has dimension {}",
            cfg.n,
            f.grid().dim()
        )))
    } else {
        Ok(())
    }
}
