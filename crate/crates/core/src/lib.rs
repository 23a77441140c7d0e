//! Dynamical decoupling, homogenization and decoherence suppression for quadratic
//! bosonic Hamiltonians, worked out in the symplectic (phase-space) picture.
//!
//! A Hamiltonian `H = ½ Σ A_ij R_i R_j` is represented by its symmetric matrix `A`;
//! its evolution is the symplectic matrix `S(t) = exp(-t A J)`.

pub mod averaging;
pub mod error;
pub mod error_analysis;
pub mod eulerian;
pub mod fock;
pub mod groups;
pub mod schemes;
pub mod seeding;
pub mod symplectic;

pub use error::{Error, Result};
pub use symplectic::{Basis, Matrix, QuadraticModel, SymplecticForm, SymplecticMatrix};
