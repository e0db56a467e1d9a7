//! −u″ + ω²u = f with a discontinuous right-hand side, compared with the
//! closed-form C¹ solution in both bases.

use arcsem::catalog;
use arcsem::piecewise::PiecewiseGrid;
use arcsem::solvers::{solve_screened_poisson, step_exact, BasisKind, Disc, Field};
use std::f64::consts::PI;

fn main() -> arcsem::Result<()> {
    let omega = 1.5;
    let grid = PiecewiseGrid::uniform(10)?;
    for kind in [BasisKind::Arc, BasisKind::Legendre] {
        let disc = Disc::new(kind, grid.clone())?;
        let u = solve_screened_poisson(&disc, &catalog::step_pi3, omega, 144)?;
        let field = Field::new(&disc, u, 2)?;
        let mut errs = [0.0f64; 3];
        for i in 0..400 {
            let t = -PI + 2.0 * PI * (i as f64 + 0.5) / 400.0;
            let near = grid.theta.iter().any(|b| (t - b).abs() < 0.02);
            for (d, e) in errs.iter_mut().enumerate() {
                if d == 0 || !near {
                    *e = e.max((field.value(d, t)? - step_exact(omega, t, d)).abs());
                }
            }
        }
        println!("{kind:>8}: sup errors u {:.1e}, u' {:.1e}, u'' {:.1e}", errs[0], errs[1], errs[2]);
    }
    Ok(())
}
