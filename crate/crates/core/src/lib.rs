//! Spectral toolkit for two superconducting level structures:
//!
//! * Cooper-pair-box (charge qubit / transmon) levels through Mathieu
//!   characteristic values ([`mathieu`], [`cpb`]), checked against a direct
//!   charge-basis diagonalisation.
//! * Andreev bound states of a d-wave superconductor / ferromagnetic
//!   insulator / superconductor junction ([`andreev`]), obtained by
//!   boundary matching and checked against a real-space Bogoliubov-de Gennes
//!   lattice.
//!
//! [`basis_map`] builds the 2x2 map between the Andreev-basis spinors of
//! the barrier and the computational basis.
//!
//! Units: hbar = 1, 2e = 1, k_B = 1 throughout.

pub mod andreev;
pub mod basis_map;
pub mod cpb;
pub mod error;
pub mod mathieu;

pub use error::{Error, Result};
