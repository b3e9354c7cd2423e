use crate::narx::ThetaVector;

/// Base stabilizer gain, pu field voltage per unit speed signal.
pub const PSS_BASE_GAIN: f64 = 0.7091;

/// Which speed signal feeds the stabilizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PssSignal {
    /// `omega / omega_b`, per-unit speed deviation.
    PerUnit,
    /// `omega` in electrical rad/s.
    RadPerSec,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PssConfig {
    pub base_gain: f64,
    pub nu: f64,
    pub signal: PssSignal,
    /// Base speed for the per-unit signal, rad/s.
    pub omega_b: f64,
}

impl Default for PssConfig {
    fn default() -> Self {
        Self {
            base_gain: PSS_BASE_GAIN,
            nu: 0.0,
            signal: PssSignal::PerUnit,
            omega_b: 2.0 * std::f64::consts::PI * 60.0,
        }
    }
}

impl PssConfig {
    pub fn with_nu(nu: f64) -> Self {
        Self {
            nu,
            ..Self::default()
        }
    }

    pub fn k_pss(&self) -> f64 {
        self.nu * self.base_gain
    }

    /// Converts the rotor speed deviation (rad/s) into the configured signal.
    pub fn signal(&self, delta_dot: f64) -> f64 {
        match self.signal {
            PssSignal::PerUnit => delta_dot / self.omega_b,
            PssSignal::RadPerSec => delta_dot,
        }
    }
}

/// `|g|` floored at `g_min` with the sign kept; `sign(0) = +1`.
pub fn g_safe(g_hat: f64, g_min: f64) -> f64 {
    if g_hat.abs() >= g_min {
        g_hat
    } else if g_hat < 0.0 {
        -g_min
    } else {
        g_min
    }
}

/// `(u_tilde - f_hat) / g_safe`.
pub fn linearizing_control(f_hat: f64, g_hat: f64, u_til: f64, g_min: f64) -> f64 {
    (u_til - f_hat) / g_safe(g_hat, g_min)
}

/// `u_lin + k_pss * signal`.
pub fn pss_augment(u_lin: f64, delta_dot: f64, cfg: &PssConfig) -> f64 {
    u_lin + cfg.k_pss() * delta_dot
}

/// Zero inside `[-d0, d0]`, shifted toward zero by `d0` outside.
pub fn deadzone(e: f64, d0: f64) -> f64 {
    if e > d0 {
        e - d0
    } else if e < -d0 {
        e + d0
    } else {
        0.0
    }
}

/// `theta - D(e*) jac / (1 + jac'jac)`; returns an exact copy inside the deadzone.
pub fn online_update(theta: &ThetaVector, jac: &ThetaVector, e_star: f64, d0: f64) -> ThetaVector {
    let d = deadzone(e_star, d0);
    if d == 0.0 {
        return theta.clone();
    }
    let scale = d / (1.0 + jac.norm_squared());
    theta - jac * scale
}
