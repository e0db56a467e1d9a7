//! Heat equation with a nearly discontinuous initial condition: periodic
//! drift of the derivatives in the arc and Legendre bases.

use arcsem::catalog::{heat_grid, heat_ic, HEAT_EPS};
use arcsem::piecewise::PiecewiseGrid;
use arcsem::solvers::{solve_evolution, BasisKind, Disc, Evolution};

fn main() -> arcsem::Result<()> {
    let grid = PiecewiseGrid::new(heat_grid(HEAT_EPS))?;
    let times: Vec<f64> = (0..=5).map(|i| 0.2 * i as f64).collect();
    let u0 = |t| heat_ic(HEAT_EPS, t);
    for (kind, n) in [(BasisKind::Arc, 55), (BasisKind::Legendre, 15)] {
        let disc = Disc::new(kind, grid.clone())?;
        let traj = solve_evolution(&disc, &Evolution::Heat, &u0, None, n, &times)?;
        let rep = traj.drift(&disc, 2)?;
        println!("{kind} (n = {n})");
        for (t, d) in rep.times.iter().zip(&rep.drift) {
            println!("  t = {t:.1}: E0 {:.1e}  E1 {:.1e}  E2 {:.1e}", d[0], d[1], d[2]);
        }
    }
    Ok(())
}
