//! Hyperbolicity-preserving multi-element stochastic Galerkin discontinuous
//! Galerkin solver for the compressible Euler equations with uncertain
//! initial data, plus non-intrusive reference solvers and experiment drivers.

pub mod error;
pub mod euler;
pub mod field;
pub mod mesh;
pub mod quadrature;
pub mod riemann;
pub mod stochastic;

pub use error::{Error, Result};
