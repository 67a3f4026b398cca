//! Identification and classification of unknown quantum states by greedy,
//! information-optimal single-shot Pauli measurements.
//!
//! - [`kernel`]: statevectors, Pauli strings, shot sampling, ground states.
//! - [`belief`]: Bayesian belief, exact information gain, the decision loop.
//! - [`analysis`]: closed-form approximations of the per-shot gain.
//! - [`zoo`]: spin-chain Hamiltonian families and their ground-state banks.
//! - [`harness`]: seeded experiments and report emission.

pub mod analysis;
pub mod belief;
pub mod error;
pub mod harness;
pub mod kernel;
pub mod zoo;

pub use error::{Error, Result};
