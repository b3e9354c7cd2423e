use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Matrix5;

use crate::error::{Error, Result};
use crate::kv::KvFile;

/// Sign convention of the transmission-line terms in the stator voltages.
///
/// `Standard` uses `v_q = r11 Iq + x11 Id + ...`, the generator-convention
/// impedance drop. `Symmetric` uses `v_q = r11 Iq - x11 Id + ...`, which makes
/// the line impedance a symmetric matrix; with positive `x11` that variant has
/// unstable real eigenvalues at every operating point and is kept only for
/// comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkConvention {
    Standard,
    Symmetric,
}

/// Per-unit constants of the synchronous machine, its transmission line and
/// the infinite bus.
///
/// Field names follow the usual machine-theory symbols. Damping `d` multiplies
/// the speed state `omega`, which is in electrical rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineParams {
    /// Base electrical angular speed, rad/s.
    pub omega_b: f64,
    /// Inertia constant, s.
    pub h: f64,
    /// Damping, pu torque per rad/s of rotor speed deviation.
    pub d: f64,
    pub r_s: f64,
    pub r_f: f64,
    pub r_kd: f64,
    pub r_kq: f64,
    pub l_d: f64,
    pub l_q: f64,
    pub l_ad: f64,
    pub l_aq: f64,
    pub l_f: f64,
    pub l_fkd: f64,
    pub l_kd: f64,
    pub l_kq: f64,
    pub r11: f64,
    pub x11: f64,
    pub a: f64,
    pub b: f64,
    pub v_inf: f64,
    pub p_m: f64,
    /// Replace the unit speed-voltage coefficients by `1 + omega/omega_b`.
    pub speed_coupled_z: bool,
    pub network: NetworkConvention,
}

impl Default for MachineParams {
    fn default() -> Self {
        Self::reference()
    }
}

impl MachineParams {
    /// The shipped reference machine: a large two-pole steam unit with
    /// representative per-unit data, tied to a stiff bus through a short line.
    ///
    /// With these values a 1.1392 pu terminal-voltage equilibrium exists at
    /// `P_m = 1.6512`, the electromechanical mode is lightly damped and the
    /// linearized plant is minimum phase between 1.0 and 2.0 pu.
    pub fn reference() -> Self {
        let l_ad = 1.66;
        Self {
            omega_b: 2.0 * std::f64::consts::PI * 60.0,
            h: 9.5,
            d: 0.05,
            r_s: 0.003,
            r_f: 3.9056e-4 * l_ad,
            r_kd: 0.0284,
            r_kq: 0.00619,
            l_d: 1.81,
            l_q: 1.76,
            l_ad,
            l_aq: 1.61,
            l_f: 1.825,
            l_fkd: 1.66,
            l_kd: 1.8313,
            l_kq: 2.3352,
            r11: 0.0,
            x11: 0.1,
            a: 1.0,
            b: 0.0,
            v_inf: 1.0,
            p_m: 1.6512,
            speed_coupled_z: false,
            network: NetworkConvention::Standard,
        }
    }

    /// The 5x5 flux/current matrix with `lambda = L i`, currents ordered
    /// `[Id, Iq, If, Ikd, Ikq]`.
    pub fn inductance_matrix(&self) -> Matrix5<f64> {
        #[rustfmt::skip]
        let l = Matrix5::new(
            -self.l_d, 0.0,       self.l_ad,  self.l_ad,  0.0,
            0.0,       -self.l_q, 0.0,        0.0,        self.l_aq,
            -self.l_ad, 0.0,      self.l_f,   self.l_fkd, 0.0,
            -self.l_ad, 0.0,      self.l_fkd, self.l_kd,  0.0,
            0.0,       -self.l_aq, 0.0,       0.0,        self.l_kq,
        );
        l
    }

    /// Diagonal of the resistance matrix `R`.
    pub fn resistance_diag(&self) -> [f64; 5] {
        [self.r_s, self.r_s, -self.r_f, -self.r_kd, -self.r_kq]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) {
            return Err(Error::Invalid(format!(
                "H must be positive, got {}",
                self.h
            )));
        }
        if !(self.omega_b > 0.0) {
            return Err(Error::Invalid(format!(
                "omega_b must be positive, got {}",
                self.omega_b
            )));
        }
        let det = self.inductance_matrix().determinant();
        if !(det.abs() > 1e-12) {
            return Err(Error::SingularInductance { det });
        }
        Ok(())
    }

    /// Reads a machine file. Missing keys keep their reference value.
    pub fn load(path: &Path) -> Result<Self> {
        let kv = KvFile::load(path)?;
        Self::from_kv(&kv)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_kv(&KvFile::parse("<machine>", text)?)
    }

    fn from_kv(kv: &KvFile) -> Result<Self> {
        let mut p = Self::reference();
        for e in &kv.entries {
            let slot: &mut f64 = match e.key.as_str() {
                "omega_b" => &mut p.omega_b,
                "H" => &mut p.h,
                "D" => &mut p.d,
                "r_s" => &mut p.r_s,
                "r_f" => &mut p.r_f,
                "r_kd" => &mut p.r_kd,
                "r_kq" => &mut p.r_kq,
                "L_d" => &mut p.l_d,
                "L_q" => &mut p.l_q,
                "L_ad" => &mut p.l_ad,
                "L_aq" => &mut p.l_aq,
                "L_f" => &mut p.l_f,
                "L_fkd" => &mut p.l_fkd,
                "L_kd" => &mut p.l_kd,
                "L_kq" => &mut p.l_kq,
                "r11" => &mut p.r11,
                "x11" => &mut p.x11,
                "A" => &mut p.a,
                "B" => &mut p.b,
                "v_inf" => &mut p.v_inf,
                "P_m" => &mut p.p_m,
                "speed_coupled_z" => {
                    p.speed_coupled_z = kv.boolean(e)?;
                    continue;
                }
                "network_convention" => {
                    p.network = match e.value.as_str() {
                        "standard" => NetworkConvention::Standard,
                        "symmetric" => NetworkConvention::Symmetric,
                        other => {
                            return Err(kv.error(
                                e,
                                format!(
                                "network_convention must be `standard` or `symmetric`, got `{other}`"
                            ),
                            ))
                        }
                    };
                    continue;
                }
                _ => return Err(kv.unknown(e)),
            };
            *slot = kv.number(e)?;
        }
        p.validate()?;
        Ok(p)
    }

    /// Serializes in the same format [`MachineParams::load`] reads.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let rows: [(&str, f64, &str); 21] = [
            ("omega_b", self.omega_b, "rad/s"),
            ("H", self.h, "s"),
            ("D", self.d, "pu torque per rad/s"),
            ("r_s", self.r_s, "pu"),
            ("r_f", self.r_f, "pu"),
            ("r_kd", self.r_kd, "pu"),
            ("r_kq", self.r_kq, "pu"),
            ("L_d", self.l_d, "pu"),
            ("L_q", self.l_q, "pu"),
            ("L_ad", self.l_ad, "pu"),
            ("L_aq", self.l_aq, "pu"),
            ("L_f", self.l_f, "pu"),
            ("L_fkd", self.l_fkd, "pu"),
            ("L_kd", self.l_kd, "pu"),
            ("L_kq", self.l_kq, "pu"),
            ("r11", self.r11, "pu"),
            ("x11", self.x11, "pu"),
            ("A", self.a, "dimensionless"),
            ("B", self.b, "dimensionless"),
            ("v_inf", self.v_inf, "pu"),
            ("P_m", self.p_m, "pu"),
        ];
        for (k, v, unit) in rows {
            let _ = writeln!(s, "{k} = {v}  # {unit}");
        }
        let _ = writeln!(s, "speed_coupled_z = {}", self.speed_coupled_z);
        let conv = match self.network {
            NetworkConvention::Standard => "standard",
            NetworkConvention::Symmetric => "symmetric",
        };
        let _ = writeln!(s, "network_convention = {conv}");
        s
    }
}
