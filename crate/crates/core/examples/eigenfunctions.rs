//! Generalised eigenproblem −Δu = λMu on a 12×12 section: the exact
//! eigenvalues 0, 1, 1, 4, 4 appear because trig polynomials are in the span.

use arcsem::piecewise::PiecewiseGrid;
use arcsem::solvers::{eigen_experiment, BasisKind, Disc};
use std::f64::consts::PI;

fn main() -> arcsem::Result<()> {
    let grid = PiecewiseGrid::new(vec![-PI, -PI / 3.0, PI / 3.0, PI])?;
    for kind in [BasisKind::Arc, BasisKind::Legendre] {
        let disc = Disc::new(kind, grid.clone())?;
        let (vals, _) = eigen_experiment(&disc, 12)?;
        println!("{kind:>8}: {:.10?}", &vals[..6]);
    }
    Ok(())
}
