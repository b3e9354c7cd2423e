use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::Complex;

use super::law::{PssConfig, PssSignal};
use super::poles::{synthesize_poly, PolePlacement};
use crate::error::{Error, Result};
use crate::kv::KvFile;
use crate::plant::St1aConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerKind {
    /// Adaptive feedback linearization on the NARX model.
    Neural,
    /// Proportional exciter about the initial field voltage.
    St1a,
    /// Field voltage held at its initial equilibrium value.
    None,
}

/// Controller file contents.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerConfig {
    pub kind: ControllerKind,
    pub poles: Vec<Complex<f64>>,
    pub nu: f64,
    pub d0: f64,
    /// `None` selects a tenth of `|g_hat|` at the initial operating point.
    pub g_min: Option<f64>,
    pub adapt: bool,
    pub weights: Option<PathBuf>,
    pub pss_signal: PssSignal,
    pub st1a: St1aConfig,
}

/// Shipped default: three poles at 0.7.
pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_POLE: f64 = 0.7;
pub const DEFAULT_D0: f64 = 1e-5;
/// Fraction of `|g_hat|` at equilibrium used when `g_min` is automatic.
pub const AUTO_G_MIN_FRACTION: f64 = 0.1;

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            kind: ControllerKind::Neural,
            poles: vec![Complex::new(DEFAULT_POLE, 0.0); DEFAULT_ORDER],
            nu: 0.0,
            d0: DEFAULT_D0,
            g_min: None,
            adapt: true,
            weights: None,
            pss_signal: PssSignal::PerUnit,
            st1a: St1aConfig::default(),
        }
    }
}

/// Parses `0.7`, `0.5+0.2i`, `0.5-0.2j`.
pub fn parse_complex(s: &str) -> Option<Complex<f64>> {
    let t = s.trim();
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t.parse().ok().map(|re| Complex::new(re, 0.0));
    };
    // Split at the last sign that is not a leading sign or an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re: f64 = body[..i].parse().ok()?;
            let im_str = &body[i..];
            let im: f64 = if im_str == "+" || im_str == "-" {
                format!("{im_str}1").parse().ok()?
            } else {
                im_str.parse().ok()?
            };
            Some(Complex::new(re, im))
        }
        None => {
            let im: f64 = if body.is_empty() || body == "+" || body == "-" {
                format!("{body}1").parse().ok()?
            } else {
                body.parse().ok()?
            };
            Some(Complex::new(0.0, im))
        }
    }
}

impl ControllerConfig {
    pub fn load(path: &Path) -> Result<Self> {
        Self::from_kv(&KvFile::load(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_kv(&KvFile::parse("<controller>", text)?)
    }

    fn from_kv(kv: &KvFile) -> Result<Self> {
        let mut c = Self::default();
        let mut order: Option<usize> = None;
        let mut poles: Vec<Complex<f64>> = Vec::new();
        let mut st1a_gain = None;
        for e in &kv.entries {
            match e.key.as_str() {
                "controller" => {
                    c.kind = match e.value.as_str() {
                        "neural" => ControllerKind::Neural,
                        "st1a" => ControllerKind::St1a,
                        "none" => ControllerKind::None,
                        other => {
                            return Err(kv.error(
                                e,
                                format!("controller must be neural, st1a or none, got `{other}`"),
                            ))
                        }
                    }
                }
                "p" => order = Some(kv.number(e)?),
                "pole" => {
                    for tok in e.value.split_whitespace() {
                        let z = parse_complex(tok.trim_end_matches(','))
                            .ok_or_else(|| kv.error(e, format!("`{tok}` is not a pole")))?;
                        poles.push(z);
                    }
                }
                "nu" => c.nu = kv.number(e)?,
                "d0" => c.d0 = kv.number(e)?,
                "g_min" => {
                    c.g_min = match e.value.as_str() {
                        "auto" => None,
                        _ => Some(kv.number(e)?),
                    }
                }
                "adapt" => c.adapt = kv.boolean(e)?,
                "weights" => c.weights = Some(kv.path(e)),
                "pss_signal" => {
                    c.pss_signal = match e.value.as_str() {
                        "pu" => PssSignal::PerUnit,
                        "rad" => PssSignal::RadPerSec,
                        other => {
                            return Err(kv.error(
                                e,
                                format!("pss_signal must be `pu` or `rad`, got `{other}`"),
                            ))
                        }
                    }
                }
                "st1a_gain" => st1a_gain = Some(kv.number(e)?),
                _ => return Err(kv.unknown(e)),
            }
        }
        if let Some(g) = st1a_gain {
            c.st1a.gain_product = g;
        }
        c.poles = match (order, poles.len()) {
            (None, 0) => c.poles,
            (Some(p), 0) => vec![Complex::new(DEFAULT_POLE, 0.0); p],
            (None, _) => poles,
            (Some(p), 1) => vec![poles[0]; p],
            (Some(p), n) if n == p => poles,
            (Some(p), n) => {
                return Err(Error::InvalidPoles(format!(
                    "p = {p} but {n} poles were listed"
                )));
            }
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d0 >= 0.0) {
            return Err(Error::Invalid(format!(
                "d0 must be non-negative, got {}",
                self.d0
            )));
        }
        if let Some(g) = self.g_min {
            if !(g > 0.0) {
                return Err(Error::Invalid(format!("g_min must be positive, got {g}")));
            }
        }
        if !self.nu.is_finite() {
            return Err(Error::Invalid("nu must be finite".into()));
        }
        synthesize_poly(&self.poles)?;
        Ok(())
    }

    pub fn placement(&self) -> Result<PolePlacement> {
        synthesize_poly(&self.poles)
    }

    pub fn pss(&self, omega_b: f64) -> PssConfig {
        PssConfig {
            nu: self.nu,
            signal: self.pss_signal,
            omega_b,
            ..PssConfig::default()
        }
    }

    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let kind = match self.kind {
            ControllerKind::Neural => "neural",
            ControllerKind::St1a => "st1a",
            ControllerKind::None => "none",
        };
        let _ = writeln!(s, "controller = {kind}");
        let _ = writeln!(s, "p = {}", self.poles.len());
        for z in &self.poles {
            if z.im == 0.0 {
                let _ = writeln!(s, "pole = {}", z.re);
            } else {
                let _ = writeln!(s, "pole = {}{:+}i", z.re, z.im);
            }
        }
        let _ = writeln!(s, "nu = {}", self.nu);
        let _ = writeln!(s, "d0 = {}", self.d0);
        match self.g_min {
            Some(g) => {
                let _ = writeln!(s, "g_min = {g}");
            }
            None => {
                let _ = writeln!(s, "g_min = auto");
            }
        }
        let _ = writeln!(s, "adapt = {}", self.adapt);
        if let Some(w) = &self.weights {
            let _ = writeln!(s, "weights = {}", w.display());
        }
        let signal = match self.pss_signal {
            PssSignal::PerUnit => "pu",
            PssSignal::RadPerSec => "rad",
        };
        let _ = writeln!(s, "pss_signal = {signal}");
        let _ = writeln!(s, "st1a_gain = {}", self.st1a.gain_product);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.7"), Some(Complex::new(0.7, 0.0)));
        assert_eq!(parse_complex("0.5+0.2i"), Some(Complex::new(0.5, 0.2)));
        assert_eq!(parse_complex("-0.5-0.2j"), Some(Complex::new(-0.5, -0.2)));
        assert_eq!(parse_complex("1e-1+2e-2i"), Some(Complex::new(0.1, 0.02)));
        assert_eq!(parse_complex("0.3i"), Some(Complex::new(0.0, 0.3)));
        assert_eq!(parse_complex("x"), None);
    }

    #[test]
    fn pole_forms() {
        let c = ControllerConfig::parse("p = 7\npole = 0.7\n").unwrap();
        assert_eq!(c.poles.len(), 7);
        let c = ControllerConfig::parse("pole = 0.5+0.1i\npole = 0.5-0.1i\n").unwrap();
        assert_eq!(c.poles.len(), 2);
        let c = ControllerConfig::parse("p = 0\n").unwrap();
        assert!(c.poles.is_empty());
        assert!(ControllerConfig::parse("p = 3\npole = 0.7 0.6\n").is_err());
        assert!(ControllerConfig::parse("pole = 1.2\n").is_err());
    }

    #[test]
    fn keys_and_round_trip() {
        let text =
            "controller = st1a\nnu = 3\nd0 = 0.01\ng_min = 0.2\nadapt = false\npss_signal = rad\n";
        let c = ControllerConfig::parse(text).unwrap();
        assert_eq!(c.kind, ControllerKind::St1a);
        assert_eq!(c.nu, 3.0);
        assert_eq!(c.g_min, Some(0.2));
        assert!(!c.adapt);
        assert_eq!(ControllerConfig::parse(&c.to_config_string()).unwrap(), c);
        assert!(ControllerConfig::parse("controller = pid\n").is_err());
        assert!(ControllerConfig::parse("kp = 1\n").is_err());
    }
}
