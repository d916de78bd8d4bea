//! Log-log slope estimates for error curves.

use crate::error::{Error, Result};
use crate::harness::results::AggregateResult;

/// Fewest rows accepted by [`fit_rate_slope`].
pub const MIN_FIT_POINTS: usize = 5;

/// Least-squares slope of `ln y` against `ln k`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 points, got {}", points.len())));
    }
    if let Some(&(k, y)) = points.iter().find(|(k, y)| !(*k > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidArgument(format!("log of nonpositive value at ({k}, {y})")));
    }
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(k, y)| (k.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all points share one abscissa".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Slope of `mean_sq_err` against `k` over rows with `k_min <= k <= k_max`.
pub fn fit_rate_slope(result: &AggregateResult, k_min: u64, k_max: u64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = result
        .rows
        .iter()
        .filter(|r| (k_min..=k_max).contains(&r.k))
        .map(|r| (r.k as f64, r.mean_sq_err))
        .collect();
    if pts.is_empty() {
        return Err(Error::InvalidArgument(format!("no rows in [{k_min}, {k_max}]")));
    }
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidArgument(format!(
            "{} rows in [{k_min}, {k_max}], need {MIN_FIT_POINTS}",
            pts.len()
        )));
    }
    loglog_slope(&pts)
}
