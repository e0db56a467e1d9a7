//! Sparse hp-spectral elements built from orthogonal polynomials on circular
//! arcs, for piecewise-smooth periodic problems on [−π, π].

pub mod arcpoly;
pub mod banded;
pub mod catalog;
pub mod cli;
pub mod multop;
pub mod piecewise;
pub mod error;
pub mod io;
pub mod legendreref;
pub mod quadrature;
pub mod semijacobi;
pub mod solvers;
pub mod sparse;
pub mod structmat;

pub use error::{Error, Result};
