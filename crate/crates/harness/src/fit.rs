//! Log-log least-squares rate fits.

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub const MIN_POINTS: usize = 10;

/// Fits `log v = intercept + slope · log t`. Needs at least ten points, all positive.
pub fn fit_rate(series: &[(f64, f64)]) -> Result<RateFit> {
    if series.len() < MIN_POINTS {
        return Err(HarnessError::InsufficientData(format!("{} points, need at least {MIN_POINTS}", series.len())));
    }
    if let Some(&(t, v)) = series.iter().find(|&&(t, v)| !(t > 0.0 && v > 0.0 && t.is_finite() && v.is_finite())) {
        return Err(HarnessError::InsufficientData(format!("non-positive point ({t}, {v})")));
    }
    if series.iter().all(|p| p.0 == series[0].0) {
        return Err(HarnessError::InsufficientData("all points share one t".into()));
    }
    let n = series.len() as f64;
    let xs: Vec<f64> = series.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = series.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(RateFit { slope, intercept, r2 })
}
