use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

use super::sweep::{SweepColumn, SweepRecord};

/// Ordinary least squares of `log y = slope · log x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Largest `|log y − fit|`.
    pub max_abs_residual: f64,
}

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(LabError::InvalidArgument(format!(
            "{} x values vs {} y values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(LabError::InvalidArgument(format!(
            "need at least 3 points, got {}",
            xs.len()
        )));
    }
    if let Some(v) = xs.iter().chain(ys).find(|&&v| !(v > 0.0 && v.is_finite())) {
        return Err(LabError::InvalidArgument(format!(
            "log-log fit needs positive finite values, got {v}"
        )));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let count = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / count;
    let my = ly.iter().sum::<f64>() / count;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(LabError::InvalidArgument(
            "all x values coincide; slope undefined".into(),
        ));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - slope * x - intercept).abs())
        .fold(0.0, f64::max);
    Ok(FitResult {
        slope,
        intercept,
        max_abs_residual,
    })
}

/// Log-log fit of one sweep column against another.
pub fn fit_loglog(
    records: &[SweepRecord],
    x_key: SweepColumn,
    y_key: SweepColumn,
) -> Result<FitResult> {
    let xs: Vec<f64> = records.iter().map(|r| x_key.get(r)).collect();
    let ys: Vec<f64> = records.iter().map(|r| y_key.get(r)).collect();
    fit_power_law(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let fit = fit_power_law(&[1.0, 10.0, 100.0], &[1.0, 10f64.sqrt(), 10.0]).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!(fit.max_abs_residual < 1e-12);

        let flat = fit_power_law(&[1.0, 2.0, 4.0, 8.0], &[3.0; 4]).unwrap();
        assert!(flat.slope.abs() < 1e-15);
        assert!((flat.intercept - 3f64.ln()).abs() < 1e-15);

        let xs: Vec<f64> = (0..10).map(|i| 10f64.powf(i as f64 / 3.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert!((fit_power_law(&xs, &ys).unwrap().slope - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_power_law(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(fit_power_law(&[1.0, 2.0, 0.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(fit_power_law(&[1.0, 2.0, 3.0], &[1.0, -2.0, 3.0]).is_err());
        assert!(fit_power_law(&[2.0; 3], &[1.0, 2.0, 3.0]).is_err());
    }
}
