use nalgebra::{Complex, RowSVector, SMatrix, SVector};

use super::equilibrium::find_equilibrium;
use super::model::{derivatives, terminal_voltage, MachineState, StateVector};
use super::params::MachineParams;
use crate::error::{Error, Result};

/// Small-signal model `dx = A x + b u`, `y = c x + d u` about an equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub a_mat: SMatrix<f64, 7, 7>,
    pub b_vec: SVector<f64, 7>,
    pub c_vec: RowSVector<f64, 7>,
    pub d_scal: f64,
    /// Transmission zeros; six of them since the relative degree is one.
    pub zeros: Vec<Complex<f64>>,
}

impl LinearModel {
    /// First Markov parameter `c b`; nonzero means relative degree one.
    pub fn cb(&self) -> f64 {
        (self.c_vec * self.b_vec)[0]
    }

    pub fn poles(&self) -> Vec<Complex<f64>> {
        self.a_mat.complex_eigenvalues().iter().copied().collect()
    }

    pub fn is_minimum_phase(&self) -> bool {
        self.zeros.iter().all(|z| z.re < 0.0)
    }

    /// `c (sI - A)^-1 b + d` evaluated at a complex frequency.
    pub fn transfer(&self, s: Complex<f64>) -> Option<Complex<f64>> {
        let a = self.a_mat.map(|v| Complex::new(-v, 0.0))
            + SMatrix::<Complex<f64>, 7, 7>::identity() * s;
        let b = self.b_vec.map(|v| Complex::new(v, 0.0));
        let x = a.lu().solve(&b)?;
        let c = self.c_vec.map(|v| Complex::new(v, 0.0));
        Some((c * x)[0] + self.d_scal)
    }
}

fn step(x: f64) -> f64 {
    (1e-6 * x.abs()).max(1e-8)
}

/// Central-difference linearization and transmission zeros.
pub fn linearize(
    params: &MachineParams,
    eq_state: &MachineState,
    eq_u: f64,
) -> Result<LinearModel> {
    let res = derivatives(eq_state, eq_u, params)?.amax();
    if !(res <= 1e-8) {
        return Err(Error::NotAnEquilibrium { residual: res });
    }
    let x0 = eq_state.to_vector();
    let f = |x: &StateVector, u: f64| derivatives(&MachineState::from_vector(x), u, params);
    let h = |x: &StateVector| terminal_voltage(&MachineState::from_vector(x), params);

    let mut a_mat = SMatrix::<f64, 7, 7>::zeros();
    let mut c_vec = RowSVector::<f64, 7>::zeros();
    for k in 0..7 {
        let hk = step(x0[k]);
        let mut xp = x0;
        let mut xm = x0;
        xp[k] += hk;
        xm[k] -= hk;
        a_mat.set_column(k, &((f(&xp, eq_u)? - f(&xm, eq_u)?) / (2.0 * hk)));
        c_vec[k] = (h(&xp)? - h(&xm)?) / (2.0 * hk);
    }
    let hu = step(eq_u);
    let b_vec = (f(&x0, eq_u + hu)? - f(&x0, eq_u - hu)?) / (2.0 * hu);

    let zeros = transmission_zeros(&a_mat, &b_vec, &c_vec)?;
    Ok(LinearModel {
        a_mat,
        b_vec,
        c_vec,
        d_scal: 0.0,
        zeros,
    })
}

/// Zeros of a relative-degree-one SISO system.
///
/// The Rosenbrock pencil `[A b; c 0] - s [I 0; 0 0]` has its finite
/// eigenvalues equal to the eigenvalues of the zero dynamics
/// `P A` restricted to `ker c`, where `P = I - b c / (c b)` projects along `b`.
fn transmission_zeros(
    a: &SMatrix<f64, 7, 7>,
    b: &SVector<f64, 7>,
    c: &RowSVector<f64, 7>,
) -> Result<Vec<Complex<f64>>> {
    let cb = (c * b)[0];
    let scale = c.norm() * b.norm();
    if !(cb.abs() > 1e-10 * scale) {
        let condition = if cb == 0.0 {
            f64::INFINITY
        } else {
            scale / cb.abs()
        };
        return Err(Error::IllConditioned { condition });
    }
    let p = SMatrix::<f64, 7, 7>::identity() - b * c / cb;
    let n = kernel_basis(c);
    let reduced = n.transpose() * p * a * n;
    Ok(reduced.complex_eigenvalues().iter().copied().collect())
}

/// Orthonormal basis of `ker c` from the Householder reflector mapping `c^T` to an axis.
fn kernel_basis(c: &RowSVector<f64, 7>) -> SMatrix<f64, 7, 6> {
    let mut v = c.transpose();
    let norm = v.norm();
    let pivot = if v[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += pivot * norm;
    let hh = SMatrix::<f64, 7, 7>::identity() - v * v.transpose() * (2.0 / v.norm_squared());
    hh.fixed_columns::<6>(1).into_owned()
}

/// One line of the minimum-phase report.
#[derive(Debug, Clone, PartialEq)]
pub struct ZerosRow {
    pub v_ref: f64,
    pub u_eq: f64,
    pub delta: f64,
    pub cb: f64,
    pub zeros: Vec<Complex<f64>>,
}

impl ZerosRow {
    pub fn max_real(&self) -> f64 {
        self.zeros
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Equilibrium, `c b` and zeros at each terminal-voltage setpoint.
pub fn zeros_table(params: &MachineParams, grid: &[f64]) -> Result<Vec<ZerosRow>> {
    grid.iter()
        .map(|&v| {
            let eq = find_equilibrium(params, v)?;
            let lin = linearize(params, &eq.state, eq.u)?;
            let mut zeros = lin.zeros.clone();
            zeros.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            Ok(ZerosRow {
                v_ref: v,
                u_eq: eq.u,
                delta: eq.state.delta,
                cb: lin.cb(),
                zeros,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_model(v: f64) -> LinearModel {
        let p = MachineParams::reference();
        let eq = find_equilibrium(&p, v).unwrap();
        linearize(&p, &eq.state, eq.u).unwrap()
    }

    #[test]
    fn angle_row_is_exact() {
        let lin = reference_model(1.1392);
        let row: Vec<f64> = lin.a_mat.row(0).iter().copied().collect();
        assert_eq!(row, vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn relative_degree_one_and_minimum_phase() {
        for v in [1.0, 1.1392, 1.5, 2.0] {
            let lin = reference_model(v);
            assert!(lin.cb().abs() > 1e-6, "v = {v}");
            assert_eq!(lin.zeros.len(), 6);
            assert!(lin.is_minimum_phase(), "v = {v}: {:?}", lin.zeros);
        }
    }

    #[test]
    fn zeros_null_the_transfer_function() {
        let lin = reference_model(1.1392);
        let g_ref = lin.transfer(Complex::new(-3.0, 2.0)).unwrap().norm();
        for z in &lin.zeros {
            let g = lin.transfer(*z).unwrap().norm();
            assert!(g <= 1e-6 * g_ref.max(1.0), "zero {z}: |G| = {g}");
        }
    }

    #[test]
    fn open_loop_is_stable_with_damping() {
        let lin = reference_model(1.1392);
        for pole in lin.poles() {
            assert!(pole.re <= 1e-9, "{pole}");
        }
    }

    #[test]
    fn non_equilibrium_rejected() {
        let p = MachineParams::reference();
        let eq = find_equilibrium(&p, 1.1392).unwrap();
        let err = linearize(&p, &eq.state, eq.u + 0.01).unwrap_err();
        assert!(matches!(err, Error::NotAnEquilibrium { .. }));
    }

    #[test]
    fn zeros_of_a_known_system() {
        // Diagonal A with b = c^T = ones: G(s) = sum 1/(s - a_i); zeros interlace the poles.
        let a = SMatrix::<f64, 7, 7>::from_diagonal(&SVector::from([
            -1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0,
        ]));
        let b = SVector::<f64, 7>::repeat(1.0);
        let c = b.transpose();
        let z = transmission_zeros(&a, &b, &c).unwrap();
        for zi in &z {
            assert!(zi.im.abs() < 1e-9);
            let g: f64 = (1..=7).map(|k| 1.0 / (zi.re + k as f64)).sum();
            assert!(g.abs() < 1e-8, "{zi}: {g}");
        }
    }
}
