use crate::error::{Error, Result};
use crate::narx::{Dataset, NarxModel};

/// Floor on the selected deadzone radius, pu.
pub const DEADZONE_FLOOR: f64 = 1e-6;

/// One-step-ahead prediction errors over a held-out set.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub max_abs_error: f64,
    pub max_abs_output: f64,
    /// `100 * max_abs_error / max_abs_output`.
    pub relative_error_pct: f64,
    /// `y_hat - y` per record.
    pub errors: Vec<f64>,
}

impl ValidationReport {
    pub fn from_errors(errors: Vec<f64>, outputs: impl IntoIterator<Item = f64>) -> Self {
        let max_abs_error = errors.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        let max_abs_output = outputs.into_iter().fold(0.0f64, |a, y| a.max(y.abs()));
        let relative_error_pct = if max_abs_output > 0.0 {
            100.0 * max_abs_error / max_abs_output
        } else if max_abs_error == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            max_abs_error,
            max_abs_output,
            relative_error_pct,
            errors,
        }
    }

    pub fn rms_error(&self) -> f64 {
        if self.errors.is_empty() {
            return 0.0;
        }
        (self.errors.iter().map(|e| e * e).sum::<f64>() / self.errors.len() as f64).sqrt()
    }

    /// `q`-quantile of `|e|` by nearest rank.
    pub fn abs_error_quantile(&self, q: f64) -> f64 {
        let mut a: Vec<f64> = self.errors.iter().map(|e| e.abs()).collect();
        if a.is_empty() {
            return 0.0;
        }
        a.sort_by(f64::total_cmp);
        let rank = (q * a.len() as f64).ceil().max(1.0) as usize;
        a[rank.min(a.len()) - 1]
    }
}

pub fn cross_validate(model: &NarxModel, holdout: &Dataset) -> Result<ValidationReport> {
    if holdout.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let errors = holdout
        .records
        .iter()
        .map(|r| model.predict(&r.z, r.u) - r.y_next)
        .collect();
    Ok(ValidationReport::from_errors(
        errors,
        holdout.records.iter().map(|r| r.y_next),
    ))
}

/// 95th percentile of `|e|`, rounded up to one significant figure, floored at 1e-6.
pub fn select_deadzone(report: &ValidationReport) -> Result<f64> {
    if report.errors.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let q = report.abs_error_quantile(0.95);
    Ok(round_up_one_sig(q).max(DEADZONE_FLOOR))
}

fn round_up_one_sig(x: f64) -> f64 {
    if !(x > 0.0) || !x.is_finite() {
        return 0.0;
    }
    let exp = x.log10().floor();
    let unit = 10f64.powf(exp);
    let mantissa = x / unit;
    // Values that are already one digit (up to representation error) stay put.
    let nearest = mantissa.round();
    let digit = if (mantissa - nearest).abs() <= 1e-9 * mantissa {
        nearest
    } else {
        mantissa.ceil()
    };
    // Printing through the decimal representation removes the 9.000000000000002e-3 tail.
    format!("{digit}e{exp}").parse().unwrap_or(digit * unit)
}
