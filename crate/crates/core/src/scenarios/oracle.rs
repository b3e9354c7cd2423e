use std::collections::VecDeque;

use crate::controller::{ControllerState, ExactModel, LoopSettings, PolePlacement, PssConfig};
use crate::error::Result;
use crate::narx::{Regressor, N_U, N_Y};

/// Closed loop of the exact-model controller around a synthetic NARX plant.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    /// `y(0) .. y(n)`.
    pub y: Vec<f64>,
    /// `u(0) .. u(n-1)`.
    pub u: Vec<f64>,
    /// `|y(k+1) + sum C_{p-1-i} y(k-i) - k1 r(k)|` per step.
    pub residuals: Vec<f64>,
}

impl OracleRun {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(*r))
    }
}

/// Plant `y(k+1) = f(z) + g(z) u(k)` controlled with `f_hat = f`, `g_hat = g` and no adaptation.
///
/// The plant keeps its own histories, so the controller's bookkeeping is checked
/// rather than trusted. Histories start at `y0` and zero input.
pub fn run_oracle_loop<F, G>(
    spec: &PolePlacement,
    f: F,
    g: G,
    r: &[f64],
    y0: f64,
) -> Result<OracleRun>
where
    F: Fn(&Regressor) -> f64 + Clone,
    G: Fn(&Regressor) -> f64 + Clone,
{
    let settings = LoopSettings {
        spec: spec.clone(),
        pss: PssConfig::default(),
        d0: 0.0,
        g_min: 1e-12,
        adaptation_enabled: false,
    };
    let model = ExactModel {
        f: f.clone(),
        g: g.clone(),
    };
    let mut ctrl = ControllerState::new(model, settings, y0, 0.0)?;

    let depth = spec.p.max(N_Y);
    let mut y_hist: VecDeque<f64> = std::iter::repeat_n(y0, depth).collect();
    let mut u_hist: VecDeque<f64> = std::iter::repeat_n(0.0, N_U).collect();
    let mut run = OracleRun {
        y: vec![y0],
        u: Vec::with_capacity(r.len()),
        residuals: Vec::with_capacity(r.len()),
    };
    for &rk in r {
        let y_now = y_hist[0];
        let out = ctrl.control_step(rk, y_now, 0.0)?;
        let ys: Vec<f64> = y_hist.iter().copied().collect();
        let us: Vec<f64> = u_hist.iter().copied().collect();
        let z = Regressor::from_history(&ys, &us)?;
        let y_next = f(&z) + g(&z) * out.u;

        let feedback: f64 = (0..spec.p)
            .map(|i| spec.coeffs[spec.p - 1 - i] * ys[i])
            .sum();
        run.residuals.push((y_next + feedback - spec.k1 * rk).abs());

        y_hist.pop_back();
        y_hist.push_front(y_next);
        u_hist.pop_back();
        u_hist.push_front(out.u);
        run.y.push(y_next);
        run.u.push(out.u);
    }
    Ok(run)
}
