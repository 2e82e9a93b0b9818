//! Pulse-sequence composition for systematic amplitude errors on multiple
//! control fields, with Pauli algebra, dense unitaries and fidelity analysis.

pub mod analysis;
pub mod encoded;
pub mod error;
pub mod pauli;
pub mod sequence;
pub mod unitary;

pub use error::{Error, Result};
