//! Linear Schrödinger equation u_t = i u_θθ: unitary evolution, mass
//! conservation and periodic drift.

use arcsem::catalog::schrodinger_ic;
use arcsem::piecewise::PiecewiseGrid;
use arcsem::solvers::{solve_evolution, BasisKind, Disc, Evolution};
use std::f64::consts::PI;

fn main() -> arcsem::Result<()> {
    let grid = PiecewiseGrid::new(vec![-PI, -PI / 3.0, PI / 3.0, PI])?;
    let times: Vec<f64> = (0..=4).map(|i| 0.25 * i as f64).collect();
    for (kind, n) in [(BasisKind::Arc, 60), (BasisKind::Legendre, 93)] {
        let disc = Disc::new(kind, grid.clone())?;
        let traj = solve_evolution(&disc, &Evolution::Schrodinger, &schrodinger_ic, None, n, &times)?;
        let norms = traj.mass_norms(&disc)?;
        let rep = traj.drift(&disc, 2)?;
        println!("{kind} (n = {n})");
        for ((t, d), m) in rep.times.iter().zip(&rep.drift).zip(&norms) {
            println!("  t = {t:.2}: ‖u‖ = {m:.12}  E0 {:.1e}  E1 {:.1e}  E2 {:.1e}", d[0], d[1], d[2]);
        }
    }
    Ok(())
}
