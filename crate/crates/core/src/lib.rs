//! Numerical laboratory for two-dimensional multispeed Klein-Gordon systems
//!
//! ```text
//! (∂_t² − c_α²Δ + b_α²) u_α = Σ A_{αβγ} u_β u_γ
//! ```
//!
//! The crate covers the dispersion relations and phase functions of the
//! system, the geometry of their resonant sets, Littlewood-Paley and `Z`-norm
//! machinery on periodic lattices, a pseudospectral profile solver and an
//! iterated-Duhamel growth experiment.

pub mod dispersion;
pub mod dyadic;
pub mod error;
pub mod growthlab;
pub mod numerics;
pub mod phase;
pub mod resonance;
pub mod solver;

pub use dispersion::{SignedSpecies, SpeciesParams, SystemConfig};
pub use error::{Error, Result};
pub use numerics::NumericsSettings;
pub use phase::{Phase, PhaseTriple};
