//! Exact depth computations for atomic measures, mod-2 Schubert calculus on
//! real Grassmannians, and a search for deep projections.

pub mod centers;
pub mod depth;
pub mod error;
pub mod gen;
pub mod linalg;
pub mod rational;
pub mod schubert;
pub mod simplex;
pub mod transversal;

pub use error::{Error, Result};
