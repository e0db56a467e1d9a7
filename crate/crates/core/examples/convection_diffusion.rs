//! Convection-diffusion u_t = u_θθ − v(θ) u_θ with a slowly varying velocity.

use arcsem::catalog::{self, convdiff_ic};
use arcsem::piecewise::PiecewiseGrid;
use arcsem::solvers::{solve_evolution, BasisKind, Disc, Evolution};
use std::f64::consts::PI;

fn main() -> arcsem::Result<()> {
    let grid = PiecewiseGrid::new(vec![-PI, -PI / 4.0, PI / 4.0, PI])?;
    let v = catalog::lookup("convdiff_v").expect("registered");
    let times = [0.0, 0.5, 1.0, 2.5];
    for (kind, n) in [(BasisKind::Arc, 177), (BasisKind::Legendre, 216)] {
        let disc = Disc::new(kind, grid.clone())?;
        let traj = solve_evolution(&disc, &Evolution::ConvectionDiffusion(&*v), &convdiff_ic, None, n, &times)?;
        let rep = traj.drift(&disc, 2)?;
        println!("{kind} (n = {n})");
        for (k, (t, d)) in rep.times.iter().zip(&rep.drift).enumerate() {
            let u = disc.eval(traj.parts(k).0, 1.0)?;
            println!("  t = {t:.1}: u(1) = {u:+.10}  E1 {:.1e}  E2 {:.1e}", d[1], d[2]);
        }
    }
    Ok(())
}
