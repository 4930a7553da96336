//! Log-log rate fitting for convergence curves: weighted least squares of
//! `log(value)` on `log(s)` with delta-method weights, plus pass/fail
//! reporting against target exponents.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RateError {
    #[error("rate fits need at least 4 usable grid points, got {0}")]
    TooFewPoints(usize),
    #[error("intensity grid must be strictly increasing with ratio >= 2, violated at index {0}")]
    BadGrid(usize),
    #[error("curve value {value} at s = {s} is not positive; the curve has hit the noise floor (raise replications)")]
    NonPositiveValue { s: f64, value: f64 },
}

/// Fitted log-log exponent with its uncertainty and diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub exponent: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub s_grid: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Indices dropped by the noise-floor guard (value below 2x its stderr).
    pub excluded: Vec<usize>,
}

/// Weighted least squares of `log(value)` on `log(s)`.
///
/// Weights are inverse squared delta-method errors `stderr/value`; when every
/// stderr is zero (deterministic curves) the fit is unweighted and the
/// exponent uncertainty comes from the residuals instead. Points whose value
/// is below twice its standard error are excluded: the log of noise biases
/// exponents toward zero.
pub fn fit_rate(curve: &[(f64, f64, f64)]) -> Result<RateFit, RateError> {
    let mut usable: Vec<(f64, f64, f64)> = Vec::with_capacity(curve.len());
    let mut excluded = Vec::new();
    for (idx, &(s, v, se)) in curve.iter().enumerate() {
        if v <= 0.0 {
            if se > 0.0 {
                excluded.push(idx);
                continue;
            }
            return Err(RateError::NonPositiveValue { s, value: v });
        }
        if se > 0.0 && v < 2.0 * se {
            excluded.push(idx);
            continue;
        }
        usable.push((s, v, se));
    }
    if usable.len() < 4 {
        return Err(RateError::TooFewPoints(usable.len()));
    }
    for i in 1..usable.len() {
        if usable[i].0 < 2.0 * usable[i - 1].0 * (1.0 - 1e-12) {
            return Err(RateError::BadGrid(i));
        }
    }
    let weighted = usable.iter().all(|&(_, _, se)| se > 0.0);
    let pts: Vec<(f64, f64, f64)> = usable
        .iter()
        .map(|&(s, v, se)| {
            let w = if weighted { (v / se) * (v / se) } else { 1.0 };
            (s.ln(), v.ln(), w)
        })
        .collect();
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let sx: f64 = pts.iter().map(|p| p.2 * p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.2 * p.1).sum();
    let xbar = sx / sw;
    let ybar = sy / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar) * (p.0 - xbar)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar) * (p.1 - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residuals: Vec<f64> = pts.iter().map(|p| p.1 - (intercept + slope * p.0)).collect();
    let rss: f64 = pts.iter().zip(&residuals).map(|(p, r)| p.2 * r * r).sum();
    let tss: f64 = pts.iter().map(|p| p.2 * (p.1 - ybar) * (p.1 - ybar)).sum();
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    let stderr = if weighted {
        // Weights are inverse variances of log(value).
        (1.0 / sxx).sqrt()
    } else {
        let dof = (pts.len() - 2) as f64;
        (rss / dof / sxx).sqrt()
    };
    Ok(RateFit {
        exponent: slope,
        intercept,
        stderr,
        r_squared,
        s_grid: usable.iter().map(|p| p.0).collect(),
        residuals,
        excluded,
    })
}

/// One row of a rate report: a fit compared against its target exponent.
#[derive(Debug, Clone, Serialize)]
pub struct RateReportRow {
    pub curve: String,
    pub target: f64,
    pub exponent: f64,
    pub stderr: f64,
    pub z_score: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compare fits to target exponents at an absolute tolerance.
pub fn rate_report(
    fits: &[(String, RateFit)],
    targets: &[f64],
    tolerance: f64,
) -> Vec<RateReportRow> {
    fits.iter()
        .zip(targets)
        .map(|((name, fit), &target)| {
            let err = fit.exponent - target;
            RateReportRow {
                curve: name.clone(),
                target,
                exponent: fit.exponent,
                stderr: fit.stderr,
                z_score: if fit.stderr > 0.0 { err / fit.stderr } else { f64::INFINITY * err.signum() },
                tolerance,
                pass: err.abs() <= tolerance,
            }
        })
        .collect()
}
