//! The piecewise hat/bubble basis on a grid: hats, adaptive expansion and the
//! sparse mass and stiffness matrices.

use arcsem::piecewise::{PiecewiseBasis, PiecewiseGrid};
use std::f64::consts::PI;

fn main() -> arcsem::Result<()> {
    let grid = PiecewiseGrid::parse("-3.141592653589793,-1,0.5,2,3.141592653589793")?;
    let basis = PiecewiseBasis::new(grid.clone(), -1)?;
    println!("{} elements, lengths {:?}", grid.m(), (0..grid.m()).map(|i| grid.length(i)).collect::<Vec<_>>());
    for t in [-PI, -1.0, -0.25, 0.5, 2.0] {
        let hats: Vec<f64> = (0..grid.m()).map(|i| grid.hat_eval(i, t)).collect();
        println!("hats at θ = {t:+.3}: {hats:.3?}");
    }

    let f = |t: f64| (t.sin()).exp();
    let c = basis.transform(&f, 1e-14)?;
    println!("exp(sin θ): {} coefficients, value at 1.0 = {:.15} (exact {:.15})", c.len(), basis.eval(&c, 1.0)?, f(1.0));

    let n = 4 * grid.m();
    let mass = basis.mass(n)?;
    let lap = basis.weak_laplacian(n)?;
    println!("n = {n}: mass has {} non-zeros; Laplacian is CB3 with m = {}, p = {}", mass.nnz(), lap.m, lap.p);
    Ok(())
}
