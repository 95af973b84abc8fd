//! Unfitted Nitsche finite elements for two-phase Stokes flow on
//! structured triangular meshes.

pub mod assembly;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod mesh;
pub mod solver;
pub mod spaces;
pub mod sparse;
pub mod verification;

pub use error::{Error, Result};
