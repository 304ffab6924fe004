//! Analytic normal-mode machinery for `N` identical particles in a
//! spherically symmetric confinement, expanded about the high-dimension
//! equilibrium where every particle sits at the same radius and every pair
//! subtends the same angle.
//!
//! That configuration is invariant under particle interchange, which forces
//! the `P x P` harmonic problem (`P = N(N+1)/2` internal coordinates) down
//! to two 2x2 eigenproblems and one scalar: at most five distinct
//! frequencies for any `N`. This crate builds the invariant matrices,
//! constructs the symmetry-coordinate bases for the three participating
//! species, solves the reduced problems in closed form, and reconstructs
//! frequencies, mixing angles, normal coordinates, particle motions,
//! wave-function values, and first-order energies - all cross-checked
//! against a dense brute-force eigensolver.
//!
//! Entry points:
//! - [`system::SystemSpec`]: the validated input record.
//! - [`spectral::SpectralSolution::solve`]: the closed-form solution.
//! - [`verify::verify_report`]: every structural identity, checked densely.
//! - [`bench`]: closed-form vs dense timing.

pub mod assembly;
pub mod basis;
pub mod bench;
pub mod error;
pub mod motion;
pub mod output;
pub mod spectral;
pub mod system;
pub mod verify;
pub mod wavefunction;

pub use error::{Error, Result};
pub use spectral::SpectralSolution;
pub use system::SystemSpec;
