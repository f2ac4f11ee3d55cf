//! Coherence flow in PT- and anti-PT-symmetric qubit systems.

pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod bloch;
pub mod cli;
pub mod coherence;
pub mod linalg;
pub mod optics;
pub mod optimize;
pub mod tomography;
pub mod two_qubit;

pub use error::{Error, Result};
