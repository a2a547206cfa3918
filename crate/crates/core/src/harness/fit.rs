use crate::error::{Error, Result};

use super::ExperimentRecord;

/// Least-squares slope of `ln(mean)` against `ln(n)` over `(n, mean)` points.
pub fn power_law_fit(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::invalid("a power-law fit needs at least 3 points"));
    }
    if points.iter().any(|&(n, m)| !(n > 0.0 && m > 0.0)) {
        return Err(Error::invalid("power-law fit needs positive sizes and means"));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("power-law fit needs at least two distinct sizes"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Exponent of mean evaluations against problem size.
pub fn record_exponent(records: &[ExperimentRecord]) -> Result<f64> {
    let points: Vec<(f64, f64)> = records.iter().map(|r| (r.n as f64, r.mean_evals)).collect();
    power_law_fit(&points)
}
