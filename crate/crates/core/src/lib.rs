//! Exact reasoning about actual causes, sufficient causes and explanations in
//! finite structural causal models.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] builds, evaluates and intervenes on acyclic models.
//! * [`causation`] decides actual, but-for and sufficient causes.
//! * [`explanation`] decides (partial) explanations relative to a context set.
//! * [`classifier`] lifts pixel labelers into depth-two models.
//! * [`dsl`] parses and prints the `.cm` text format.
//! * [`verify`] runs randomized checks of the two structural theorems.
//! * [`naive`] restates the definitions by brute force, for cross-checking.

pub mod causation;
pub mod classifier;
pub mod dsl;
pub mod error;
pub mod explanation;
pub mod model;
pub mod naive;
pub mod rational;
pub mod verify;

#[cfg(test)]
mod fixtures;

pub use error::{Error, Result};
