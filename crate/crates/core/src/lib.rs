//! Simulation, neural identification and adaptive feedback-linearizing
//! excitation control of a synchronous machine on an infinite bus.
//!
//! The pipeline runs in four stages, each in its own module:
//!
//! - [`plant`]: the seventh-order machine model, equilibria, linearization and
//!   the proportional ST1A exciter used as a baseline.
//! - [`narx`]: the affine two-network predictor `y(k+1) = f(z) + g(z) u(k)`
//!   and its Levenberg-Marquardt trainer.
//! - [`identifier`]: excitation data, regression records, validation and
//!   deadzone selection.
//! - [`controller`]: pole placement, the linearizing control law, the
//!   stabilizer term and the deadzone weight adaptation.
//! - [`scenarios`]: event-scripted closed-loop experiments and traces.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod controller;
pub mod error;
pub mod identifier;
pub mod kv;
pub mod narx;
pub mod plant;
pub mod scenarios;

pub use error::{Error, Result};
