//! Geometric coefficient decay of an analytic function with nearby
//! singularities: fitted rate ρ̂ in the arc and Legendre bases.

use arcsem::catalog;
use arcsem::piecewise::PiecewiseGrid;
use arcsem::solvers::{convergence_study, BasisKind};
use std::f64::consts::PI;

fn main() -> arcsem::Result<()> {
    let grid = PiecewiseGrid::new(vec![-PI, 0.0, PI])?;
    let f = catalog::lookup("fig5").expect("registered");
    for kind in [BasisKind::Arc, BasisKind::Legendre] {
        let conv = convergence_study(&*f, &grid, kind)?;
        let head: Vec<String> = conv.per_degree.iter().step_by(10).map(|v| format!("{v:.1e}")).collect();
        println!("{kind:>8}: ρ̂ = {:.4}; max |c| every 10 degrees: {}", conv.rho, head.join(" "));
    }
    Ok(())
}
