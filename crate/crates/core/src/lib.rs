//! Exact diagonalization of kinetically constrained spin-1/2 chains.
//!
//! The chain forbids `radius` consecutive up spins. Starting from a basis
//! enumerated under that constraint, the crate builds the projected
//! transverse-field Hamiltonian, resolves translation and reflection sectors,
//! diagonalizes them, and computes level statistics, ETH indicators and
//! Dicke-like scar diagnostics.

pub mod basis;
pub mod cache;
pub mod error;
pub mod eth;
pub mod format;
pub mod hamiltonian;
pub mod pipeline;
pub mod scars;
pub mod spectral;
pub mod suite;
pub mod symmetry;

pub use basis::{BoundaryCondition, ConstrainedBasis, SpinConfiguration};
pub use error::{Error, Result};
pub use hamiltonian::{ModelParams, OperatorMatrix};
pub use spectral::Spectrum;
pub use symmetry::{Parity, SectorChoice, SectorLabel, SymmetrySector};
