//! Synchronous machine connected to an infinite bus through a line.

mod equilibrium;
mod linearize;
mod model;
mod params;
mod st1a;

pub use equilibrium::{find_equilibrium, find_equilibrium_with, Equilibrium, EquilibriumOptions};
pub use linearize::{linearize, zeros_table, LinearModel, ZerosRow};
pub use model::{
    advance, derivatives, dq_currents, electrical_interface, rk4_step, stator_voltages,
    terminal_voltage, ElectricalInterface, MachineState, StateVector, MICRO_STEPS,
};
pub use params::{MachineParams, NetworkConvention};
pub use st1a::{st1a_control, St1aConfig};
