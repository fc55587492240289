//! Energy-stable time integrators for periodic phase-field models.
//!
//! The crate is organized around the exponential scalar auxiliary variable
//! (E-SAV) family of schemes, with classical SAV baselines, a two-step
//! decoupled scheme for the coupled fluid-surfactant system, and a
//! benchmark harness for convergence and energy-decay experiments.

pub mod cli;
pub mod error;
pub mod harness;
pub mod models;
pub mod schemes;
pub mod spectral;

pub use error::{Error, Result};
