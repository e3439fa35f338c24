use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Ordinary least-squares line fit. For log-log fits `exponent` is the
/// slope of `ln y` against `ln x`; `residual` is the RMS residual of the
/// fitted (possibly log-transformed) data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub exponent: Option<f64>,
    pub residual: f64,
}

pub fn fit_linear(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(GeomError::TooFew {
            needed: 3,
            got: points.len(),
        });
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(GeomError::InvalidInput("non-finite fit data".into()));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(GeomError::InvalidInput("x values are not distinct".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    Ok(FitResult {
        slope,
        intercept,
        exponent: None,
        residual: (sse / k).sqrt(),
    })
}

pub fn fit_loglog(points: &[(f64, f64)]) -> Result<FitResult> {
    if let Some((x, y)) = points.iter().find(|(x, y)| !(*x > 0.0) || !(*y > 0.0)) {
        return Err(GeomError::InvalidInput(format!(
            "log-log fit needs positive data, got ({x}, {y})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let mut fit = fit_linear(&logs)?;
    fit.exponent = Some(fit.slope);
    Ok(fit)
}
