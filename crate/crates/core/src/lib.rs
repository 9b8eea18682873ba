//! Numerical model of the harmonic quantum Szilard engine.
//!
//! Natural units throughout: ħ = m = ω = k_B = 1. Energies are in ħω,
//! entropies in k_B, `theta` is βħω, `g` is the dimensionless delta-barrier
//! strength and `x0` the barrier position in the parabolic-cylinder
//! argument (x0 = √2 q0). See [`units`] for conversions.

pub mod cycle;
pub mod demon;
pub mod error;
mod roots;
pub mod specfun;
pub mod spectrum;
pub mod thermo;
pub mod tolerances;
pub mod units;
pub mod validation;

pub use error::{Error, Result};
