//! Reduction of quantum program specifications over mixed Hadamard bases,
//! and projective-measurement testing of simulated programs with them.

pub mod basis;
pub mod error;
pub mod experiment;
pub mod harness;
pub mod mutation;
pub mod programs;
pub mod statevector;
pub mod stats;

pub use error::{Error, Result};
