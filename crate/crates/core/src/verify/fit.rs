use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line through `(ln n, ln value)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentFit {
    pub quantity_id: String,
    /// Sorted by `n`.
    pub points: Vec<(usize, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl ExponentFit {
    pub fn named(mut self, quantity_id: impl Into<String>) -> Self {
        self.quantity_id = quantity_id.into();
        self
    }
}

/// Ordinary least squares on log-log coordinates.
///
/// Points are sorted by `n` first, so any permutation of the input gives
/// bit-identical output.
pub fn fit_exponent(points: &[(usize, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!("need at least 3 points, got {}", points.len())));
    }
    let mut points = points.to_vec();
    points.sort_by_key(|p| p.0);
    if points.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Degenerate("repeated n".into()));
    }
    if let Some(&(n, v)) = points.iter().find(|&&(n, v)| n == 0 || !v.is_finite() || v <= 0.0) {
        return Err(Error::Degenerate(format!("non-positive point ({n}, {v})")));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(ExponentFit { quantity_id: String::new(), points, slope, intercept, r_squared })
}

/// Trend of a ratio series after absorbing `ln(n)^log_power`.
///
/// Upper-bound ratios are divided by the log factor, lower-bound ratios
/// multiplied, matching which side of the inequality the factor may sit on.
pub fn trend_fit(points: &[(usize, f64)], log_power: f64, upper_bound: bool) -> Result<ExponentFit> {
    let adjusted: Vec<(usize, f64)> = points
        .iter()
        .map(|&(n, v)| {
            let factor = (n as f64).ln().powf(log_power);
            (n, if upper_bound { v / factor } else { v * factor })
        })
        .collect();
    fit_exponent(&adjusted)
}
