use std::sync::Arc;

use crate::calculus::{gradient, gradient_lp_norm, lp_norm, lp_norm_values, weighted_mean_values};
use crate::error::{LabError, Result};
use crate::grid::{Density, Grid, ScalarField};
use crate::inequality::{ratio_report, ExponentConfig, RatioReport};

use super::trig::{check_nyquist, random_coefficients, TrigPolynomial};

/// Forward-difference step on unit-norm coefficient vectors.
const FD_STEP: f64 = 1e-7;
/// Stop once an accepted step improves the ratio by less than this, relatively.
const MIN_RELATIVE_GAIN: f64 = 1e-6;
const INITIAL_STEP: f64 = 0.5;
const MAX_STEP: f64 = 1.0;
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct AscentOutcome {
    /// Maximizer rescaled to `‖df‖_{L^p} = 1`.
    pub field: ScalarField,
    /// Unit-norm trigonometric coefficients of the maximizer (before rescaling).
    pub coefficients: Vec<f64>,
    /// Ratio after every accepted step, starting with the initial iterate.
    pub trace: Vec<f64>,
    /// Number of gradient evaluations performed.
    pub iterations: usize,
    /// All terms of the ratio evaluated on `field`.
    pub report: RatioReport,
}

/// Trig basis sampled on the grid together with its discrete gradients.
struct Basis {
    dim: usize,
    values: Vec<Vec<f64>>,
    gradients: Vec<Vec<f64>>,
}

impl Basis {
    fn new(grid: &Arc<Grid>, max_freq: usize) -> Result<Self> {
        let count = 2 * super::trig::wave_vectors(grid.dim(), max_freq).len();
        let poly = TrigPolynomial::new(grid.lengths(), max_freq, vec![0.0; count])?;
        let mut values = Vec::with_capacity(count);
        let mut gradients = Vec::with_capacity(count);
        for i in 0..count {
            let field = ScalarField::from_fn(grid.clone(), |x| poly.basis(i, x))?;
            gradients.push(gradient(&field)?.components().to_vec());
            values.push(field.into_values());
        }
        Ok(Basis {
            dim: grid.dim(),
            values,
            gradients,
        })
    }

    fn len(&self) -> usize {
        self.values.len()
    }

    fn assemble(&self, coefficients: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut f = vec![0.0; self.values[0].len()];
        let mut df = vec![0.0; self.gradients[0].len()];
        for (i, &c) in coefficients.iter().enumerate() {
            axpy(c, &self.values[i], &mut f);
            axpy(c, &self.gradients[i], &mut df);
        }
        (f, df)
    }
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// The ratio as a function of raw node values and gradient components.
struct Objective<'a> {
    weights: &'a [f64],
    omega: &'a [f64],
    dim: usize,
    p: f64,
    r: f64,
    omega_factor: f64,
}

impl Objective<'_> {
    fn eval(&self, f: &[f64], df: &[f64]) -> Result<f64> {
        let magnitude: Vec<f64> = df
            .chunks_exact(self.dim)
            .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect();
        let grad = lp_norm_values(self.weights, &magnitude, self.p)?;
        if grad == 0.0 {
            return Ok(0.0);
        }
        let centre = weighted_mean_values(self.weights, self.omega, f);
        let shifted: Vec<f64> = f.iter().map(|v| v - centre).collect();
        let deficit = lp_norm_values(self.weights, &shifted, self.r)?;
        Ok(deficit / (self.omega_factor * grad))
    }
}

/// Ascent on the ratio over low-frequency trigonometric polynomials.
///
/// Each iteration takes a forward-difference gradient in coefficient space,
/// moves along its normalized direction, and halves the step until the ratio
/// improves. Steps that do not improve are never accepted, so `trace` is
/// non-decreasing. The run stops after `budget` iterations, when the relative
/// gain of an accepted step drops below `1e-6`, or when no step improves.
pub fn maximize_deficit(
    omega: &Density,
    cfg: &ExponentConfig,
    max_freq: usize,
    budget: usize,
    seed: u64,
) -> Result<AscentOutcome> {
    let grid = omega.grid();
    check_nyquist(grid, max_freq)?;
    if budget == 0 {
        return Err(LabError::InvalidArgument(
            "ascent budget must be positive".into(),
        ));
    }
    if grid.dim() != cfg.n {
        return Err(LabError::GridMismatch(format!(
            "exponents are for n = {} but the grid has dimension {}",
            cfg.n,
            grid.dim()
        )));
    }
    let basis = Basis::new(grid, max_freq)?;
    let objective = Objective {
        weights: grid.weights(),
        omega: omega.values(),
        dim: basis.dim,
        p: cfg.p,
        r: cfg.r,
        omega_factor: lp_norm(omega.field(), cfg.q)?.powf(cfg.alpha),
    };

    let mut coefficients = normalized(random_coefficients(basis.len(), seed));
    let (mut f, mut df) = basis.assemble(&coefficients);
    let mut current = objective.eval(&f, &df)?;
    let mut trace = vec![current];
    let mut step = INITIAL_STEP;
    let mut iterations = 0;

    while iterations < budget {
        iterations += 1;
        let direction = {
            let mut g = Vec::with_capacity(basis.len());
            let mut fp = f.clone();
            let mut dfp = df.clone();
            for i in 0..basis.len() {
                fp.copy_from_slice(&f);
                dfp.copy_from_slice(&df);
                axpy(FD_STEP, &basis.values[i], &mut fp);
                axpy(FD_STEP, &basis.gradients[i], &mut dfp);
                g.push((objective.eval(&fp, &dfp)? - current) / FD_STEP);
            }
            normalized(g)
        };
        if direction.iter().all(|&x| x == 0.0) {
            break;
        }
        let mut accepted = None;
        while step >= MIN_STEP {
            let trial: Vec<f64> = coefficients
                .iter()
                .zip(&direction)
                .map(|(c, d)| c + step * d)
                .collect();
            let trial = normalized(trial);
            let (tf, tdf) = basis.assemble(&trial);
            let value = objective.eval(&tf, &tdf)?;
            if value > current {
                accepted = Some((trial, tf, tdf, value));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, tf, tdf, value)) = accepted else {
            break;
        };
        let gain = (value - current) / current.abs().max(f64::MIN_POSITIVE);
        coefficients = trial;
        f = tf;
        df = tdf;
        current = value;
        trace.push(current);
        step = (2.0 * step).min(MAX_STEP);
        if gain < MIN_RELATIVE_GAIN {
            break;
        }
    }

    let raw = ScalarField::new(grid.clone(), f)?;
    let scale = gradient_lp_norm(&gradient(&raw)?, cfg.p)?;
    if scale == 0.0 {
        return Err(LabError::ConstantField);
    }
    let field = raw.map(|v| v / scale)?;
    let report = ratio_report(&field, omega, cfg)?;
    Ok(AscentOutcome {
        field,
        coefficients,
        trace,
        iterations,
        report,
    })
}
