use crate::error::{Error, Result};

/// Central-difference step.
pub const FD_STEP: f64 = 1e-4;

/// Denominator floor for the relative error, so coordinates whose true
/// gradient is ~0 are compared in absolute terms.
pub const RELATIVE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub tolerance: f64,
    pub relative_errors: Vec<f64>,
    pub numeric: Vec<f64>,
    /// Indices whose relative error exceeds the tolerance.
    pub flagged: Vec<usize>,
}

impl GradCheckReport {
    pub fn max_relative_error(&self) -> f64 {
        self.relative_errors.iter().copied().fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.flagged.is_empty()
    }
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(RELATIVE_FLOOR)
}

/// Compare `analytic` to central differences of `loss_fn` around `params`.
pub fn grad_check<F>(mut loss_fn: F, params: &[f64], analytic: &[f64], tolerance: f64) -> Result<GradCheckReport>
where
    F: FnMut(&[f64]) -> f64,
{
    if params.len() != analytic.len() {
        return Err(Error::Shape(format!(
            "{} parameters but {} gradient entries",
            params.len(),
            analytic.len()
        )));
    }
    let base = loss_fn(params);
    if !base.is_finite() {
        return Err(Error::Data(format!("loss is not finite at the check point: {base}")));
    }
    let mut probe = params.to_vec();
    let mut numeric = Vec::with_capacity(params.len());
    let mut relative_errors = Vec::with_capacity(params.len());
    let mut flagged = Vec::new();
    for i in 0..params.len() {
        let orig = probe[i];
        probe[i] = orig + FD_STEP;
        let plus = loss_fn(&probe);
        probe[i] = orig - FD_STEP;
        let minus = loss_fn(&probe);
        probe[i] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::Data(format!("loss is not finite when perturbing parameter {i}")));
        }
        let fd = (plus - minus) / (2.0 * FD_STEP);
        let rel = relative_error(analytic[i], fd);
        if rel > tolerance {
            flagged.push(i);
        }
        numeric.push(fd);
        relative_errors.push(rel);
    }
    Ok(GradCheckReport {
        tolerance,
        relative_errors,
        numeric,
        flagged,
    })
}
