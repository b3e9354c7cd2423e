use std::path::Path;

use super::config::{Action, ScenarioConfig};
use super::trace::{Trace, TraceRow};
use crate::controller::{
    ControllerConfig, ControllerKind, ControllerState, LoopSettings, AUTO_G_MIN_FRACTION,
};
use crate::error::{Error, Result};
use crate::narx::{weights, NarxModel, Regressor, N_IN, N_Y};
use crate::plant::{advance, electrical_interface, find_equilibrium, st1a_control, MachineParams};

enum Exciter {
    Neural {
        ctrl: Box<ControllerState<NarxModel>>,
        /// Field voltage that the model's zero input stands for.
        u_base: f64,
    },
    St1a {
        u_hold: f64,
    },
    Hold {
        u_hold: f64,
    },
}

fn auto_g_min(model: &NarxModel, y0: f64, u0: f64) -> Result<f64> {
    let mut z = [u0; N_IN];
    z[..N_Y].fill(y0);
    let (_, g) = model.components(&Regressor(z));
    let g_min = AUTO_G_MIN_FRACTION * g.abs();
    if g_min > 0.0 && g_min.is_finite() {
        Ok(g_min)
    } else {
        Err(Error::Invalid(format!(
            "model input gain is {g} at the initial operating point; set g_min explicitly"
        )))
    }
}

/// Adaptive controller started at equilibrium `(y0, u_eq)`, with inputs measured from `u_base`.
pub fn neural_controller(
    cfg: &ControllerConfig,
    model: NarxModel,
    omega_b: f64,
    y0: f64,
    u_eq: f64,
    u_base: f64,
) -> Result<ControllerState<NarxModel>> {
    let u0 = u_eq - u_base;
    let g_min = match cfg.g_min {
        Some(g) => g,
        None => auto_g_min(&model, y0, u0)?,
    };
    let settings = LoopSettings {
        spec: cfg.placement()?,
        pss: cfg.pss(omega_b),
        d0: cfg.d0,
        g_min,
        adaptation_enabled: cfg.adapt,
    };
    ControllerState::new(model, settings, y0, u0)
}

fn load_model(cfg: &ControllerConfig) -> Result<NarxModel> {
    let path = cfg
        .weights
        .as_deref()
        .ok_or_else(|| Error::Invalid("the neural controller needs a `weights` file".into()))?;
    weights::load(path)
}

/// Runs with the weights named in the controller config.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Trace> {
    let model = match cfg.controller.kind {
        ControllerKind::Neural => Some(load_model(&cfg.controller)?),
        _ => None,
    };
    run_scenario_with_model(cfg, model)
}

/// Same as [`run_scenario`] with weights supplied in memory; ignored unless the controller is neural.
pub fn run_scenario_with_model(cfg: &ScenarioConfig, model: Option<NarxModel>) -> Result<Trace> {
    cfg.validate()?;
    let dt = cfg.dt_control;
    let n = cfg.samples();
    let mut params: MachineParams = cfg.machine.clone();
    let eq = find_equilibrium(&params, cfg.v_ref)?;
    let mut state = eq.state;

    let mut exciter = match cfg.controller.kind {
        ControllerKind::Neural => {
            let model = match model {
                Some(m) => m,
                None => load_model(&cfg.controller)?,
            };
            let u_base = if cfg.v_nominal == cfg.v_ref {
                eq.u
            } else {
                find_equilibrium(&params, cfg.v_nominal)?.u
            };
            let ctrl =
                neural_controller(&cfg.controller, model, params.omega_b, eq.v_t, eq.u, u_base)?;
            Exciter::Neural {
                ctrl: Box::new(ctrl),
                u_base,
            }
        }
        ControllerKind::St1a => Exciter::St1a { u_hold: eq.u },
        ControllerKind::None => Exciter::Hold { u_hold: eq.u },
    };

    let mut events = cfg.events.iter().peekable();
    // (k_start, k_end, h_from, h_to) of an active inertia ramp.
    let mut ramp: Option<(usize, usize, f64, f64)> = None;
    let mut v_ref = cfg.v_ref;
    let mut rows = Vec::with_capacity(n + 1);

    for k in 0..=n {
        let t = k as f64 * dt;
        while let Some(ev) = events.next_if(|ev| ev.sample(dt) <= k) {
            match ev.action {
                Action::SetVref(v) => v_ref = v,
                Action::SetPm(p) => params.p_m = p,
                Action::ScaleH { factor, ramp: r } => {
                    let h_from = params.h;
                    let h_to = ramp.map_or(h_from, |(.., to)| to) * factor;
                    let steps = r.map_or(0, |r| (r / dt).round() as usize);
                    if steps == 0 {
                        params.h = h_to;
                        ramp = None;
                    } else {
                        ramp = Some((k, k + steps, h_from, h_to));
                    }
                }
            }
        }
        if let Some((k0, k1, from, to)) = ramp {
            let frac = ((k - k0) as f64 / (k1 - k0) as f64).min(1.0);
            params.h = from + (to - from) * frac;
            if k >= k1 {
                ramp = None;
            }
        }

        let v_t = electrical_interface(&state, &params)?.v_t;
        let (v_f, e_star, adapted) = match &mut exciter {
            Exciter::Neural { ctrl, u_base } => {
                let out = ctrl
                    .control_step(v_ref, v_t, state.omega)
                    .map_err(|e| match e {
                        Error::NonFinite { .. } => Error::DivergedAtTime { time: t },
                        other => other,
                    })?;
                (*u_base + out.u, out.e_star.unwrap_or(0.0), out.adapted)
            }
            Exciter::St1a { u_hold } => (
                *u_hold + st1a_control(v_t, v_ref, &cfg.controller.st1a),
                0.0,
                false,
            ),
            Exciter::Hold { u_hold } => (*u_hold, 0.0, false),
        };
        rows.push(TraceRow {
            t,
            v_ref,
            v_t,
            v_f,
            delta: state.delta,
            omega: state.omega,
            e_star,
            adapted,
        });
        if k == n {
            break;
        }
        state = advance(&state, v_f, dt, &params).map_err(|e| match e {
            Error::NonFinite { .. } => Error::DivergedAtTime { time: t + dt },
            other => other,
        })?;
        if state.delta.abs() > std::f64::consts::PI {
            return Err(Error::LossOfSynchronism {
                sample: k + 1,
                delta: state.delta,
            });
        }
    }
    Ok(Trace { rows })
}

/// Loads a scenario file and runs it.
pub fn simulate_file(path: &Path) -> Result<Trace> {
    run_scenario(&ScenarioConfig::load(path)?)
}
