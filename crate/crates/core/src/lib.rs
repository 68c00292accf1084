//! Numerical and exact tools for abelian vortices on the torus and the
//! algebraic invariants attached to gauged linear sigma models.

pub mod acceptance;
pub mod error;
pub mod index;
pub mod lattice;
pub mod rational;
pub mod s2;
pub mod solver;
pub mod stability;
pub mod weights;

pub use error::{Error, Result};
