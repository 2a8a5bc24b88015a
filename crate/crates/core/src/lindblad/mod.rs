//! Master-equation dynamics on the truncated product space.

pub mod displacement;
pub mod evolve;
pub mod generator;
pub mod operators;
pub mod states;
pub mod steady;

pub use displacement::{displaced_transfer_rate, verify_displacement_identity};
pub use evolve::{demodulated_frequency, evolve, EvolveOptions, Trajectory};
pub use generator::{Dissipator, LindbladGenerator, Mode};
pub use operators::C64;
pub use states::{fock_state, ground_state, partial_trace_resonator, thermal_state};
pub use steady::steady_state;
