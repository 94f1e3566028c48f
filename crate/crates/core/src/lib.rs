//! scarlab: a numerical laboratory for self-dual CAR algebras.
//!
//! The crate realizes finite-dimensional self-dual CAR algebras three ways
//! and checks that they agree: exactly on fermionic Fock space, as Grassmann
//! algebras with Berezin calculus, and through Gaussian Berezin integrals
//! whose moments are Pfaffians of discrete-time covariances. On top of that
//! sit the covariance determinant/Pfaffian bounds, Combes-Thomas resolvent
//! estimates and the summability diagnostics for lattice fermion systems.

pub mod error;
pub mod numkernel;
pub mod fock;
pub mod selfdual;

pub use error::{Error, Result};
