//! Modular localization in finite dimensions.
//!
//! Standard subspaces and their Tomita data, wedge geometry, compressed
//! one-particle representations, bosonic second quantization, and a net
//! builder that assembles `O ↦ K_O` and checks it.

pub mod error;
pub mod experiments;
pub mod fock;
pub mod kernel;
pub mod linalg;
pub mod net;
pub mod sample;
pub mod subspace;
pub mod rep;
#[cfg(feature = "runner")]
pub mod runner;
pub mod report;
pub mod wedge;

pub use error::{Error, Result};
