use std::collections::VecDeque;

use nalgebra::DVector;

use super::law::{deadzone, linearizing_control, online_update, pss_augment, PssConfig};
use super::poles::{u_tilde, PolePlacement};
use crate::error::{Error, Result};
use crate::narx::{NarxModel, Regressor, ThetaVector, N_U, N_Y};

/// Anything that predicts `y(k+1) = f(z) + g(z) u` with adjustable weights.
pub trait AffinePredictor {
    fn components(&self, z: &Regressor) -> (f64, f64);
    fn theta(&self) -> ThetaVector;
    fn set_theta(&mut self, theta: &[f64]) -> Result<()>;
    /// Gradient of the prediction with respect to [`AffinePredictor::theta`].
    fn jacobian(&self, z: &Regressor, u: f64) -> ThetaVector;
}

impl AffinePredictor for NarxModel {
    fn components(&self, z: &Regressor) -> (f64, f64) {
        NarxModel::components(self, z)
    }

    fn theta(&self) -> ThetaVector {
        NarxModel::theta(self)
    }

    fn set_theta(&mut self, theta: &[f64]) -> Result<()> {
        NarxModel::set_theta(self, theta)
    }

    fn jacobian(&self, z: &Regressor, u: f64) -> ThetaVector {
        self.predict_with_jacobian(z, u).1
    }
}

/// Closed-form `f` and `g` with no weights, for exact-model checks.
pub struct ExactModel<F, G> {
    pub f: F,
    pub g: G,
}

impl<F, G> AffinePredictor for ExactModel<F, G>
where
    F: Fn(&Regressor) -> f64,
    G: Fn(&Regressor) -> f64,
{
    fn components(&self, z: &Regressor) -> (f64, f64) {
        ((self.f)(z), (self.g)(z))
    }

    fn theta(&self) -> ThetaVector {
        DVector::zeros(0)
    }

    fn set_theta(&mut self, theta: &[f64]) -> Result<()> {
        if theta.is_empty() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: 0,
                found: theta.len(),
            })
        }
    }

    fn jacobian(&self, _z: &Regressor, _u: f64) -> ThetaVector {
        DVector::zeros(0)
    }
}

/// Tunables of the adaptive linearizing loop.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSettings {
    pub spec: PolePlacement,
    pub pss: PssConfig,
    pub d0: f64,
    pub g_min: f64,
    pub adaptation_enabled: bool,
}

/// What one sampling instant produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutput {
    pub u: f64,
    pub u_lin: f64,
    pub u_tilde: f64,
    pub f_hat: f64,
    pub g_hat: f64,
    /// `y_hat*(k) - y(k)` from the previous prediction; absent on the first step.
    pub e_star: Option<f64>,
    pub adapted: bool,
}

/// Histories, weights and the pending prediction of the adaptive controller.
pub struct ControllerState<P: AffinePredictor> {
    pub model: P,
    pub settings: LoopSettings,
    /// Newest first, `max(p, 7)` long.
    y_hist: VecDeque<f64>,
    /// Newest first, 6 long.
    u_hist: VecDeque<f64>,
    /// `y_hat*(k+1)` and its weight gradient, waiting for `y(k+1)`.
    pending: Option<(f64, ThetaVector)>,
    steps: usize,
}

impl<P: AffinePredictor> ControllerState<P> {
    /// Histories pre-filled with the equilibrium output `y0` and input `u0`.
    pub fn new(model: P, settings: LoopSettings, y0: f64, u0: f64) -> Result<Self> {
        if !(settings.g_min > 0.0) {
            return Err(Error::Invalid(format!(
                "g_min must be positive, got {}",
                settings.g_min
            )));
        }
        if !(settings.d0 >= 0.0) {
            return Err(Error::Invalid(format!(
                "d0 must be non-negative, got {}",
                settings.d0
            )));
        }
        let ny = settings.spec.p.max(N_Y);
        Ok(Self {
            model,
            settings,
            y_hist: std::iter::repeat_n(y0, ny).collect(),
            u_hist: std::iter::repeat_n(u0, N_U).collect(),
            pending: None,
            steps: 0,
        })
    }

    pub fn theta(&self) -> ThetaVector {
        self.model.theta()
    }

    pub fn y_history(&self) -> Vec<f64> {
        self.y_hist.iter().copied().collect()
    }

    pub fn u_history(&self) -> Vec<f64> {
        self.u_hist.iter().copied().collect()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Regressor formed from the current histories.
    pub fn regressor(&self) -> Regressor {
        let mut z = [0.0; N_Y + N_U];
        for (slot, y) in z[..N_Y].iter_mut().zip(&self.y_hist) {
            *slot = *y;
        }
        for (slot, u) in z[N_Y..].iter_mut().zip(&self.u_hist) {
            *slot = *u;
        }
        Regressor(z)
    }

    /// One sampling instant: measure, adapt on the last prediction error, then control.
    ///
    /// `delta_dot` is the rotor speed deviation in rad/s.
    pub fn control_step(&mut self, r: f64, y_meas: f64, delta_dot: f64) -> Result<StepOutput> {
        if !y_meas.is_finite() {
            return Err(Error::NonFinite {
                context: "measured output",
            });
        }
        self.y_hist.pop_back();
        self.y_hist.push_front(y_meas);

        let mut e_star = None;
        let mut adapted = false;
        if let Some((y_pred, jac)) = self.pending.take() {
            let e = y_pred - y_meas;
            e_star = Some(e);
            if self.settings.adaptation_enabled
                && deadzone(e, self.settings.d0) != 0.0
                && !jac.is_empty()
            {
                let theta = self.model.theta();
                let next = online_update(&theta, &jac, e, self.settings.d0);
                if next.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite {
                        context: "weight adaptation",
                    });
                }
                self.model.set_theta(next.as_slice())?;
                adapted = true;
            }
        }

        let z = self.regressor();
        let (f_hat, g_hat) = self.model.components(&z);
        let y_hist: Vec<f64> = self
            .y_hist
            .iter()
            .take(self.settings.spec.p)
            .copied()
            .collect();
        let u_til = u_tilde(r, &y_hist, &self.settings.spec)?;
        let u_lin = linearizing_control(f_hat, g_hat, u_til, self.settings.g_min);
        let u = pss_augment(
            u_lin,
            self.settings.pss.signal(delta_dot),
            &self.settings.pss,
        );
        if !u.is_finite() {
            return Err(Error::NonFinite {
                context: "control input",
            });
        }

        self.u_hist.pop_back();
        self.u_hist.push_front(u);
        let y_pred = f_hat + g_hat * u;
        self.pending = Some((y_pred, self.model.jacobian(&z, u)));
        self.steps += 1;
        Ok(StepOutput {
            u,
            u_lin,
            u_tilde: u_til,
            f_hat,
            g_hat,
            e_star,
            adapted,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::poles::{repeated_pole, synthesize_poly};

    fn settings(p: usize) -> LoopSettings {
        LoopSettings {
            spec: synthesize_poly(&repeated_pole(p, 0.7)).unwrap(),
            pss: PssConfig::default(),
            d0: 1e-3,
            g_min: 0.01,
            adaptation_enabled: true,
        }
    }

    #[test]
    fn first_step_never_adapts() {
        let model = NarxModel::random(5, 5, 3);
        let mut c = ControllerState::new(model, settings(3), 1.0, 0.0).unwrap();
        let theta0 = c.theta();
        let out = c.control_step(1.1, 1.0, 0.0).unwrap();
        assert!(out.e_star.is_none());
        assert!(!out.adapted);
        assert_eq!(c.theta(), theta0);
    }

    #[test]
    fn disabled_adaptation_freezes_weights() {
        let model = NarxModel::random(5, 5, 3);
        let mut s = settings(3);
        s.adaptation_enabled = false;
        let mut c = ControllerState::new(model, s, 1.0, 0.0).unwrap();
        let theta0 = c.theta();
        for k in 0..50 {
            let out = c.control_step(1.1, 1.0 + 0.01 * k as f64, 0.0).unwrap();
            assert!(!out.adapted);
        }
        assert_eq!(c.theta(), theta0);
    }

    #[test]
    fn large_error_adapts() {
        let model = NarxModel::random(5, 5, 3);
        let mut c = ControllerState::new(model, settings(3), 1.0, 0.0).unwrap();
        let theta0 = c.theta();
        c.control_step(1.1, 1.0, 0.0).unwrap();
        let out = c.control_step(1.1, 50.0, 0.0).unwrap();
        assert!(out.adapted);
        assert_ne!(c.theta(), theta0);
    }

    #[test]
    fn histories_shift_newest_first() {
        let model = NarxModel::random(2, 2, 1);
        let mut c = ControllerState::new(model, settings(7), 1.0, 0.0).unwrap();
        let out = c.control_step(1.0, 1.5, 0.0).unwrap();
        assert_eq!(c.y_history()[..2], [1.5, 1.0]);
        assert_eq!(c.y_history().len(), 7);
        assert_eq!(c.u_history()[0], out.u);
        assert_eq!(c.u_history().len(), 6);
    }
}
