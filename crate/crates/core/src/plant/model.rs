use nalgebra::{SVector, Vector5};

use super::params::{MachineParams, NetworkConvention};
use crate::error::{Error, Result};

pub type StateVector = SVector<f64, 7>;

/// RK4 micro-steps per control sample.
pub const MICRO_STEPS: usize = 4;

/// Plant state `[delta, omega, lambda_d, lambda_q, lambda_f, lambda_kd, lambda_kq]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MachineState {
    /// Power angle, rad. Never wrapped.
    pub delta: f64,
    /// Power-angle derivative, electrical rad/s (zero at equilibrium).
    pub omega: f64,
    pub lambda: Vector5<f64>,
}

impl MachineState {
    pub fn from_vector(x: &StateVector) -> Self {
        Self {
            delta: x[0],
            omega: x[1],
            lambda: Vector5::new(x[2], x[3], x[4], x[5], x[6]),
        }
    }

    pub fn to_vector(&self) -> StateVector {
        let l = &self.lambda;
        StateVector::from([self.delta, self.omega, l[0], l[1], l[2], l[3], l[4]])
    }

    pub fn is_finite(&self) -> bool {
        self.delta.is_finite()
            && self.omega.is_finite()
            && self.lambda.iter().all(|v| v.is_finite())
    }

    /// Power angle folded into `(-pi, pi]`, for display only.
    pub fn delta_principal(&self) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        let d = self.delta.rem_euclid(two_pi);
        if d > std::f64::consts::PI {
            d - two_pi
        } else {
            d
        }
    }
}

/// Stator-side quantities derived from a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectricalInterface {
    /// Currents `[Id, Iq, If, Ikd, Ikq]`.
    pub i: Vector5<f64>,
    pub v_d: f64,
    pub v_q: f64,
    pub p_e: f64,
    pub v_t: f64,
}

/// Solves `L i = lambda` for the winding currents.
pub fn dq_currents(lambda: &Vector5<f64>, params: &MachineParams) -> Result<Vector5<f64>> {
    let lu = params.inductance_matrix().lu();
    let i = lu.solve(lambda).ok_or_else(|| Error::SingularInductance {
        det: params.inductance_matrix().determinant(),
    })?;
    if i.iter().all(|v| v.is_finite()) {
        Ok(i)
    } else {
        Err(Error::NonFinite {
            context: "dq current solve",
        })
    }
}

/// Stator voltages from the line drop and the infinite-bus source.
pub fn stator_voltages(delta: f64, i_d: f64, i_q: f64, params: &MachineParams) -> (f64, f64) {
    let p = params;
    let (sin, cos) = delta.sin_cos();
    let v_d = p.r11 * i_d - p.x11 * i_q + p.v_inf * (p.a * sin + p.b * cos);
    let cross = match p.network {
        NetworkConvention::Standard => p.x11 * i_d,
        NetworkConvention::Symmetric => -p.x11 * i_d,
    };
    let v_q = p.r11 * i_q + cross + p.v_inf * (p.a * cos - p.b * sin);
    (v_d, v_q)
}

pub fn electrical_interface(
    state: &MachineState,
    params: &MachineParams,
) -> Result<ElectricalInterface> {
    let i = dq_currents(&state.lambda, params)?;
    let (v_d, v_q) = stator_voltages(state.delta, i[0], i[1], params);
    let p_e = state.lambda[0] * i[1] - state.lambda[1] * i[0];
    let v_t = (v_d * v_d + v_q * v_q).sqrt();
    Ok(ElectricalInterface {
        i,
        v_d,
        v_q,
        p_e,
        v_t,
    })
}

/// Terminal voltage, the plant output.
pub fn terminal_voltage(state: &MachineState, params: &MachineParams) -> Result<f64> {
    electrical_interface(state, params).map(|e| e.v_t)
}

/// Time derivative of the 7-vector state for field voltage `u`.
pub fn derivatives(state: &MachineState, u: f64, params: &MachineParams) -> Result<StateVector> {
    let p = params;
    let e = electrical_interface(state, p)?;
    let speed = if p.speed_coupled_z {
        1.0 + state.omega / p.omega_b
    } else {
        1.0
    };
    let r = p.resistance_diag();
    let lam = &state.lambda;
    let forcing = [e.v_d, e.v_q, u, 0.0, 0.0];
    let mut dl = [0.0; 5];
    for k in 0..5 {
        dl[k] = r[k] * e.i[k] + forcing[k];
    }
    dl[0] += speed * lam[1];
    dl[1] -= speed * lam[0];

    let domega = p.omega_b / (2.0 * p.h) * (p.p_m - e.p_e - p.d * state.omega);
    Ok(StateVector::from([
        state.omega,
        domega,
        p.omega_b * dl[0],
        p.omega_b * dl[1],
        p.omega_b * dl[2],
        p.omega_b * dl[3],
        p.omega_b * dl[4],
    ]))
}

/// One classical Runge-Kutta step with `u` held over the step.
pub fn rk4_step(
    state: &MachineState,
    u: f64,
    dt: f64,
    params: &MachineParams,
) -> Result<MachineState> {
    let x = state.to_vector();
    let eval = |x: &StateVector| derivatives(&MachineState::from_vector(x), u, params);
    let k1 = eval(&x)?;
    let k2 = eval(&(x + k1 * (dt / 2.0)))?;
    let k3 = eval(&(x + k2 * (dt / 2.0)))?;
    let k4 = eval(&(x + k3 * dt))?;
    let next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    let out = MachineState::from_vector(&next);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NonFinite {
            context: "rk4 step",
        })
    }
}

/// Advances one control sample of length `dt` using [`MICRO_STEPS`] RK4 steps.
pub fn advance(
    state: &MachineState,
    u: f64,
    dt: f64,
    params: &MachineParams,
) -> Result<MachineState> {
    let h = dt / MICRO_STEPS as f64;
    let mut x = *state;
    for _ in 0..MICRO_STEPS {
        x = rk4_step(&x, u, h, params)?;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn diagonal_params() -> MachineParams {
        let mut p = MachineParams::reference();
        p.l_d = 1.0;
        p.l_q = 1.0;
        p.l_f = 1.0;
        p.l_kd = 1.0;
        p.l_kq = 1.0;
        p.l_ad = 0.0;
        p.l_aq = 0.0;
        p.l_fkd = 0.0;
        p
    }

    fn some_state() -> MachineState {
        MachineState {
            delta: 0.7,
            omega: 0.3,
            lambda: Vector5::new(1.1, -0.6, 1.4, 1.2, -0.5),
        }
    }

    #[test]
    fn zero_flux_gives_zero_current() {
        let i = dq_currents(&Vector5::zeros(), &MachineParams::reference()).unwrap();
        assert_eq!(i, Vector5::zeros());
    }

    #[test]
    fn diagonal_inductances_solve_with_sign_pattern() {
        let i = dq_currents(&Vector5::repeat(1.0), &diagonal_params()).unwrap();
        assert_relative_eq!(i, Vector5::new(-1.0, -1.0, 1.0, 1.0, 1.0), epsilon = 1e-15);
    }

    #[test]
    fn terminal_voltage_is_hypotenuse() {
        // Zero currents leave only the bus terms: at delta = pi/2, v_d = A and v_q = -B.
        let mut p = MachineParams::reference();
        p.v_inf = 1.0;
        p.a = 3.0;
        p.b = 4.0;
        let s = MachineState {
            delta: FRAC_PI_2,
            omega: 0.0,
            lambda: Vector5::zeros(),
        };
        let e = electrical_interface(&s, &p).unwrap();
        assert_relative_eq!(e.v_d, 3.0, epsilon = 1e-12);
        assert_relative_eq!(e.v_q, -4.0, epsilon = 1e-12);
        assert_relative_eq!(e.v_t, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_stator_voltage() {
        let mut p = MachineParams::reference();
        p.v_inf = 0.0;
        let s = MachineState {
            delta: 0.3,
            omega: 0.0,
            lambda: Vector5::zeros(),
        };
        assert_eq!(electrical_interface(&s, &p).unwrap().v_t, 0.0);
    }

    #[test]
    fn angle_rate_is_speed() {
        let s = some_state();
        let d = derivatives(&s, 0.01, &MachineParams::reference()).unwrap();
        assert_eq!(d[0], s.omega);
    }

    #[test]
    fn torque_balance_gives_zero_acceleration() {
        let mut p = MachineParams::reference();
        let mut s = some_state();
        s.omega = 0.0;
        p.p_m = electrical_interface(&s, &p).unwrap().p_e;
        let d = derivatives(&s, 0.0, &p).unwrap();
        assert_eq!(d[1], 0.0);
    }

    #[test]
    fn field_voltage_enters_only_field_flux() {
        let p = MachineParams::reference();
        let s = some_state();
        let a = derivatives(&s, 0.0, &p).unwrap();
        let b = derivatives(&s, 0.1, &p).unwrap();
        let diff = b - a;
        for k in 0..7 {
            if k == 4 {
                assert_relative_eq!(diff[k], 0.1 * p.omega_b, epsilon = 1e-9);
            } else {
                assert_eq!(diff[k], 0.0);
            }
        }
    }

    #[test]
    fn speed_coupled_z_changes_only_stator_rows() {
        let mut p = MachineParams::reference();
        let s = some_state();
        let a = derivatives(&s, 0.0, &p).unwrap();
        p.speed_coupled_z = true;
        let b = derivatives(&s, 0.0, &p).unwrap();
        let scale = s.omega / p.omega_b * p.omega_b;
        assert_relative_eq!(b[2] - a[2], scale * s.lambda[1], epsilon = 1e-9);
        assert_relative_eq!(b[3] - a[3], -scale * s.lambda[0], epsilon = 1e-9);
        assert_eq!(a[4], b[4]);
    }

    #[test]
    fn principal_angle() {
        let mut s = some_state();
        s.delta = 3.0 * std::f64::consts::PI + 0.1;
        assert_relative_eq!(
            s.delta_principal(),
            -std::f64::consts::PI + 0.1,
            epsilon = 1e-12
        );
    }
}
