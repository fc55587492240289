//! Periodic uniform-grid representation, trigonometric transforms,
//! Fourier-multiplier application, spectral calculus and quadrature.

mod field;
mod grid;
mod multiplier;
pub mod ops;
pub mod quadrature;
mod transform;

pub use field::{RealField, SpectralField};
pub use grid::Grid;
pub use multiplier::Multiplier;
pub use transform::Fft2d;

pub(crate) use multiplier::mode_of;
