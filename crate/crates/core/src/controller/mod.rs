//! Pole placement, the linearizing control law, stabilizer and weight adaptation.

mod config;
mod law;
mod poles;
mod state;

pub use config::{
    parse_complex, ControllerConfig, ControllerKind, AUTO_G_MIN_FRACTION, DEFAULT_D0,
    DEFAULT_ORDER, DEFAULT_POLE,
};
pub use law::{
    deadzone, g_safe, linearizing_control, online_update, pss_augment, PssConfig, PssSignal,
    PSS_BASE_GAIN,
};
pub use poles::{repeated_pole, synthesize_poly, u_tilde, PolePlacement};
pub use state::{AffinePredictor, ControllerState, ExactModel, LoopSettings, StepOutput};
