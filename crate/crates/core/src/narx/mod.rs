//! Affine NARX predictor built from two tanh networks, and its trainer.

mod mlp;
mod model;
mod train;
pub mod weights;

pub use mlp::Mlp;
pub use model::{
    mse_cost, narx_predict, weight_jacobian, Dataset, NarxModel, Record, Regressor, ThetaVector,
    DEFAULT_HIDDEN, INIT_SCALE, N_IN, N_U, N_Y,
};
pub use train::{lm_train, LmOptions, LmState, StopReason};
