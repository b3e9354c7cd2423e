use nalgebra::{SMatrix, SVector, Vector5};

use super::model::{derivatives, electrical_interface, MachineState};
use super::params::MachineParams;
use crate::error::{Error, Result};

type Unknowns = SVector<f64, 7>;

/// A steady operating point: state, field voltage and terminal voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub state: MachineState,
    pub u: f64,
    pub v_t: f64,
    /// Infinity norm of `[derivatives; v_t - v_target]` at the returned point.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct EquilibriumOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Starting point; a phasor-diagram estimate is used when absent.
    pub guess: Option<(MachineState, f64)>,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-10,
            guess: None,
        }
    }
}

/// Newton-Raphson solve of `derivatives = 0, v_t = v_target`.
///
/// `omega` is pinned to zero since the first state equation forces it; the
/// remaining unknowns are `delta`, the five fluxes and the field voltage.
pub fn find_equilibrium(params: &MachineParams, v_target: f64) -> Result<Equilibrium> {
    find_equilibrium_with(params, v_target, &EquilibriumOptions::default())
}

pub fn find_equilibrium_with(
    params: &MachineParams,
    v_target: f64,
    opts: &EquilibriumOptions,
) -> Result<Equilibrium> {
    params.validate()?;
    if !(v_target.is_finite() && v_target > 0.0) {
        return Err(Error::Invalid(format!(
            "v_target must be positive, got {v_target}"
        )));
    }
    let (s0, u0) = opts.guess.unwrap_or_else(|| phasor_guess(params, v_target));
    let mut x = pack(&s0, u0);
    let mut r = residual(&x, params, v_target)?;
    let mut norm = r.amax();

    for _ in 0..opts.max_iter {
        if norm <= opts.tol * 1e-2 {
            break;
        }
        let jac = jacobian(&x, params, v_target)?;
        let step = match jac.lu().solve(&(-r)) {
            Some(s) if s.iter().all(|v| v.is_finite()) => s,
            _ => break,
        };
        // Backtrack on the residual norm; a full step is accepted whenever it helps.
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = x + step * alpha;
            if let Ok(rt) = residual(&trial, params, v_target) {
                let nt = rt.amax();
                if nt.is_finite() && nt < norm {
                    x = trial;
                    r = rt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    if !(norm <= opts.tol) {
        return Err(Error::NoConvergence {
            what: "equilibrium solve",
            iterations: opts.max_iter,
            residual: norm,
        });
    }
    let (state, u) = unpack(&x);
    let v_t = electrical_interface(&state, params)?.v_t;
    Ok(Equilibrium {
        state,
        u,
        v_t,
        residual: norm,
    })
}

fn pack(s: &MachineState, u: f64) -> Unknowns {
    let l = &s.lambda;
    Unknowns::from([s.delta, l[0], l[1], l[2], l[3], l[4], u])
}

fn unpack(x: &Unknowns) -> (MachineState, f64) {
    let state = MachineState {
        delta: x[0],
        omega: 0.0,
        lambda: Vector5::new(x[1], x[2], x[3], x[4], x[5]),
    };
    (state, x[6])
}

fn residual(x: &Unknowns, params: &MachineParams, v_target: f64) -> Result<Unknowns> {
    let (s, u) = unpack(x);
    let d = derivatives(&s, u, params)?;
    let v_t = electrical_interface(&s, params)?.v_t;
    Ok(Unknowns::from([
        d[1],
        d[2],
        d[3],
        d[4],
        d[5],
        d[6],
        v_t - v_target,
    ]))
}

fn jacobian(x: &Unknowns, params: &MachineParams, v_target: f64) -> Result<SMatrix<f64, 7, 7>> {
    let mut j = SMatrix::<f64, 7, 7>::zeros();
    for k in 0..7 {
        let h = (1e-7 * x[k].abs()).max(1e-9);
        let mut xp = *x;
        let mut xm = *x;
        xp[k] += h;
        xm[k] -= h;
        let col = (residual(&xp, params, v_target)? - residual(&xm, params, v_target)?) / (2.0 * h);
        j.set_column(k, &col);
    }
    Ok(j)
}

/// Round-rotor phasor estimate of the operating point.
fn phasor_guess(p: &MachineParams, v_t: f64) -> (MachineState, f64) {
    use nalgebra::Complex;
    let v_inf = p.v_inf.abs().max(1e-3);
    let x_line = p.x11.abs().max(1e-3);
    let sin_theta = (p.p_m * x_line / (v_t * v_inf)).clamp(-0.95, 0.95);
    let theta = sin_theta.asin();
    let vt = Complex::from_polar(v_t, theta);
    let vb = Complex::new(v_inf, 0.0);
    let i = (vt - vb) / Complex::new(p.r11, x_line);
    let eq = vt + Complex::new(p.r_s, p.l_q) * i;
    let delta = eq.arg();
    let rot = Complex::from_polar(1.0, -(delta - std::f64::consts::FRAC_PI_2));
    let (vdq, idq) = (vt * rot, i * rot);
    let (i_d, i_q, v_q) = (idq.re, idq.im, vdq.im);
    let i_f = (v_q + p.r_s * i_q + p.l_d * i_d) / p.l_ad;
    let i_vec = Vector5::new(i_d, i_q, i_f, 0.0, 0.0);
    let lambda = p.inductance_matrix() * i_vec;
    let state = MachineState {
        delta,
        omega: 0.0,
        lambda,
    };
    (state, p.r_f * i_f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::model::dq_currents;

    /// Cofactor expansion, independent of any factorization.
    fn laplace_det(m: &[Vec<f64>]) -> f64 {
        if m.len() == 1 {
            return m[0][0];
        }
        (0..m.len())
            .map(|c| {
                let minor: Vec<Vec<f64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != c)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[0][c] * laplace_det(&minor)
            })
            .sum()
    }

    #[test]
    fn reference_equilibrium_is_a_fixed_point() {
        let p = MachineParams::reference();
        let eq = find_equilibrium(&p, 1.1392).unwrap();
        let d = derivatives(&eq.state, eq.u, &p).unwrap();
        assert!(d.amax() <= 1e-10, "{}", d.amax());
        assert!((eq.v_t - 1.1392).abs() <= 1e-10);
        assert_eq!(eq.state.omega, 0.0);
    }

    #[test]
    fn electrical_power_balances_mechanical() {
        let p = MachineParams::reference();
        for v in [1.0, 1.1392, 1.5, 2.0] {
            let eq = find_equilibrium(&p, v).unwrap();
            let e = electrical_interface(&eq.state, &p).unwrap();
            assert!((e.p_e - p.p_m).abs() <= 1e-8, "v = {v}: {}", e.p_e);
        }
    }

    #[test]
    fn currents_match_cramer_oracle() {
        let p = MachineParams::reference();
        let eq = find_equilibrium(&p, 1.1392).unwrap();
        let i = dq_currents(&eq.state.lambda, &p).unwrap();
        let l = p.inductance_matrix();
        let rows = |m: &nalgebra::Matrix5<f64>| -> Vec<Vec<f64>> {
            (0..5)
                .map(|r| (0..5).map(|c| m[(r, c)]).collect())
                .collect()
        };
        let det = laplace_det(&rows(&l));
        for k in 0..5 {
            let mut lk = l;
            lk.set_column(k, &eq.state.lambda);
            let cramer = laplace_det(&rows(&lk)) / det;
            assert!((i[k] - cramer).abs() <= 1e-12, "{k}: {} vs {cramer}", i[k]);
        }
    }

    #[test]
    fn infeasible_target_reports_residual() {
        let p = MachineParams::reference();
        let err = find_equilibrium(&p, 0.1).unwrap_err();
        assert!(
            matches!(err, Error::NoConvergence { .. }) || matches!(err, Error::NonFinite { .. }),
            "{err}"
        );
    }
}
