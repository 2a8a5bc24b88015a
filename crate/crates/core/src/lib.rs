//! Dispersive-regime analytics of a multi-level qubit coupled to a lossy
//! resonator, with exact diagonalization and a Lindblad solver to check them.

pub mod bath;
pub mod dispersive;
pub mod error;
pub mod exact;
pub mod fit;
pub mod lindblad;
pub mod model;
pub mod rates;

pub use bath::{Baths, SpectralFunction, SpectralModel};
pub use error::{Error, Result};
pub use model::{InteractionModel, QubitSpec, ResonatorSpec, SystemSpec, TransmonSpec};
