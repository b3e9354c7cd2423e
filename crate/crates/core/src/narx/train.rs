use nalgebra::{DMatrix, DVector};

use super::model::{Dataset, NarxModel, ThetaVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop once the cost is at or below this value.
    pub cost_tol: f64,
    pub mu_init: f64,
    /// Give up once the damping grows past this value.
    pub mu_max: f64,
    /// `false` entries freeze the matching parameter.
    pub trainable: Option<Vec<bool>>,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iter: 150,
            cost_tol: 0.0,
            mu_init: 1e-2,
            mu_max: 1e12,
            trainable: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    CostTolerance,
    MaxIterations,
    /// No damping level produced a decrease.
    Stalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmState {
    pub mu: f64,
    /// Initial cost followed by the cost after every accepted step.
    pub cost_history: Vec<f64>,
    /// Outer iterations performed (each ends in an accepted step or a stop).
    pub iteration: usize,
    pub accepted: usize,
    pub rejected: usize,
    /// Last accepted step.
    pub step: ThetaVector,
    /// Step length multiplier; the damping already scales the step, so this stays 1.
    pub rho: f64,
    pub stop: StopReason,
}

impl LmState {
    pub fn final_cost(&self) -> f64 {
        *self
            .cost_history
            .last()
            .expect("history holds the initial cost")
    }
}

/// Residuals `y_hat - y` and the Jacobian of the predictions, one row per record.
fn residuals_and_jacobian(
    model: &NarxModel,
    data: &Dataset,
    mask: Option<&[bool]>,
) -> (DVector<f64>, DMatrix<f64>) {
    let n = data.len();
    let np = model.param_count();
    let mut r = DVector::zeros(n);
    let mut j = DMatrix::zeros(n, np);
    for (k, rec) in data.records.iter().enumerate() {
        let (y, grad) = model.predict_with_jacobian(&rec.z, rec.u);
        r[k] = y - rec.y_next;
        for c in 0..np {
            if mask.is_none_or(|m| m[c]) {
                j[(k, c)] = grad[c];
            }
        }
    }
    (r, j)
}

/// Batch Levenberg-Marquardt on the joint parameter vector.
///
/// Each outer iteration solves `(J'J + mu I) s = -J'r` and retries with ten
/// times the damping until the cost drops; an accepted step divides the
/// damping by ten.
pub fn lm_train(
    model: &NarxModel,
    data: &Dataset,
    opts: &LmOptions,
) -> Result<(NarxModel, LmState)> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if opts.max_iter == 0 {
        return Err(Error::Invalid("max_iter must be at least 1".into()));
    }
    if !(opts.mu_init > 0.0) {
        return Err(Error::Invalid(format!(
            "mu_init must be positive, got {}",
            opts.mu_init
        )));
    }
    let np = model.param_count();
    if let Some(m) = &opts.trainable {
        if m.len() != np {
            return Err(Error::DimensionMismatch {
                expected: np,
                found: m.len(),
            });
        }
    }
    let mask = opts.trainable.as_deref();

    let mut current = model.clone();
    let mut theta = current.theta();
    let mut cost = current.mse_cost(data)?;
    if !cost.is_finite() {
        return Err(Error::NonFinite {
            context: "initial training cost",
        });
    }
    let mut state = LmState {
        mu: opts.mu_init,
        cost_history: vec![cost],
        iteration: 0,
        accepted: 0,
        rejected: 0,
        step: DVector::zeros(np),
        rho: 1.0,
        stop: StopReason::MaxIterations,
    };

    while state.iteration < opts.max_iter {
        if cost <= opts.cost_tol {
            state.stop = StopReason::CostTolerance;
            return Ok((current, state));
        }
        state.iteration += 1;
        let (r, j) = residuals_and_jacobian(&current, data, mask);
        let jtj = j.tr_mul(&j);
        let neg_grad = -j.tr_mul(&r);

        loop {
            let mut lhs = jtj.clone();
            for d in 0..np {
                lhs[(d, d)] += state.mu;
            }
            let solved = lhs.clone().cholesky().map(|c| c.solve(&neg_grad));
            let step = match solved {
                Some(s) if s.iter().all(|v| v.is_finite()) => s,
                _ => {
                    if state.mu > opts.mu_max {
                        return Err(Error::NormalEquations {
                            mu: state.mu,
                            condition: condition_estimate(&lhs),
                        });
                    }
                    state.mu *= 10.0;
                    continue;
                }
            };
            let trial_theta = &theta + &step;
            let trial = current.with_theta(trial_theta.as_slice())?;
            let trial_cost = trial.mse_cost(data)?;
            if trial_cost.is_finite() && trial_cost < cost {
                theta = trial_theta;
                current = trial;
                cost = trial_cost;
                state.step = step;
                state.cost_history.push(cost);
                state.accepted += 1;
                state.mu = (state.mu / 10.0).max(1e-20);
                break;
            }
            state.rejected += 1;
            state.mu *= 10.0;
            if state.mu > opts.mu_max {
                state.stop = StopReason::Stalled;
                return Ok((current, state));
            }
        }
    }
    state.stop = if cost <= opts.cost_tol {
        StopReason::CostTolerance
    } else {
        StopReason::MaxIterations
    };
    Ok((current, state))
}

/// Ratio of extreme diagonal entries, a cheap lower bound on the condition number.
fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let d = m.diagonal();
    let max = d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min = d.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}
