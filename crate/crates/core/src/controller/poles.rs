use nalgebra::Complex;

use crate::error::{Error, Result};

/// Closed-loop characteristic polynomial `Q(z) = z^p + C_{p-1} z^{p-1} + ... + C_0`
/// and the reference gain `k1 = Q(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolePlacement {
    pub p: usize,
    /// `C_0 .. C_{p-1}`.
    pub coeffs: Vec<f64>,
    pub k1: f64,
}

impl PolePlacement {
    /// `Q(z)` at a real point.
    pub fn q_at(&self, z: f64) -> f64 {
        let mut acc = 1.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Closed-loop output for the pure difference equation
    /// `y(k+1) = k1 r(k) - sum C_{p-1-i} y(k-i)`; `y_hist` is newest first.
    pub fn next_output(&self, r: f64, y_hist: &[f64]) -> Result<f64> {
        u_tilde(r, y_hist, self)
    }
}

/// Expands `prod (z - z_i)` into monic real coefficients.
pub fn synthesize_poly(poles: &[Complex<f64>]) -> Result<PolePlacement> {
    for z in poles {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidPoles(format!("non-finite pole {z}")));
        }
        if !(z.norm() < 1.0) {
            return Err(Error::InvalidPoles(format!(
                "pole {z} is not strictly inside the unit circle"
            )));
        }
    }
    check_conjugate_closed(poles)?;

    // poly[j] is the coefficient of z^j.
    let mut poly = vec![Complex::new(1.0, 0.0)];
    for &z in poles {
        let mut next = vec![Complex::new(0.0, 0.0); poly.len() + 1];
        for (j, c) in poly.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * z;
        }
        poly = next;
    }
    let p = poles.len();
    let coeffs: Vec<f64> = poly[..p].iter().map(|c| c.re).collect();
    let mut spec = PolePlacement { p, coeffs, k1: 0.0 };
    // Unity DC gain: k1 = Q(1) = 1 + sum C_i.
    spec.k1 = spec.q_at(1.0);
    Ok(spec)
}

fn check_conjugate_closed(poles: &[Complex<f64>]) -> Result<()> {
    let tol = 1e-12;
    let mut used = vec![false; poles.len()];
    for i in 0..poles.len() {
        if used[i] || poles[i].im.abs() <= tol {
            continue;
        }
        let target = poles[i].conj();
        let partner =
            (0..poles.len()).find(|&j| j != i && !used[j] && (poles[j] - target).norm() <= tol);
        match partner {
            Some(j) => {
                used[i] = true;
                used[j] = true;
            }
            None => {
                return Err(Error::InvalidPoles(format!(
                    "pole {} has no conjugate partner",
                    poles[i]
                )))
            }
        }
    }
    Ok(())
}

/// Pseudo-input `k1 r - [C_{p-1} y(k) + ... + C_0 y(k-p+1)]`; `y_hist` newest first.
pub fn u_tilde(r: f64, y_hist: &[f64], spec: &PolePlacement) -> Result<f64> {
    if y_hist.len() < spec.p {
        return Err(Error::InsufficientHistory {
            needed: spec.p,
            have: y_hist.len(),
        });
    }
    let mut feedback = 0.0;
    for (i, y) in y_hist.iter().take(spec.p).enumerate() {
        feedback += spec.coeffs[spec.p - 1 - i] * y;
    }
    Ok(spec.k1 * r - feedback)
}

/// `p` poles at one real location.
pub fn repeated_pole(p: usize, at: f64) -> Vec<Complex<f64>> {
    vec![Complex::new(at, 0.0); p]
}
