//! Numerical realization of weighted Sobolev/Besov norms on Lipschitz graph
//! domains, trace/extension operators for higher-order Dirichlet data,
//! singular-integral operators on weighted half-space Lebesgue spaces,
//! half-space Green residuals, and desk-scale Dirichlet solvers.

pub mod cli;
pub mod error;
pub mod flatten;
pub mod geometry;
pub mod green;
pub mod halfspace_ops;
pub mod multiindex;
pub mod quad;
pub mod solver;
pub mod spaces;
pub mod util;
pub mod whitney;

pub use error::{Error, Result};
