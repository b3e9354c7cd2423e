use crate::error::{Error, Result};

/// Static proportional exciter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct St1aConfig {
    /// Overall gain from voltage error to field voltage, pu/pu.
    pub gain_product: f64,
    /// Exciter gain.
    pub k_e: f64,
    /// Exciter time constant, s. Zero for the static variant.
    pub t_e: f64,
    /// `r_f / x_ad`, converting exciter output to the field-voltage base.
    pub ratio: f64,
}

impl Default for St1aConfig {
    fn default() -> Self {
        Self {
            gain_product: 0.0781,
            k_e: 200.0,
            t_e: 0.0,
            ratio: 3.9056e-4,
        }
    }
}

impl St1aConfig {
    pub fn validate(&self) -> Result<()> {
        // The default gain is the product rounded to three significant figures.
        let product = self.k_e * self.ratio;
        if (self.gain_product - product).abs() > 5e-5 {
            return Err(Error::Invalid(format!(
                "ST1A gain {} differs from K_e * ratio = {product}",
                self.gain_product
            )));
        }
        Ok(())
    }
}

/// Field-voltage correction `gain * (v_ref - v_t)`.
pub fn st1a_control(v_t: f64, v_ref: f64, cfg: &St1aConfig) -> f64 {
    cfg.gain_product * (v_ref - v_t)
}
