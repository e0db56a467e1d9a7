//! Trigonometric polynomials are represented exactly by the piecewise basis:
//! M(2N+1) coefficients for b = 0 and M·max(2N,1) for b = −1.

use arcsem::piecewise::{significant, PiecewiseBasis, PiecewiseGrid};
use std::f64::consts::PI;

fn main() -> arcsem::Result<()> {
    let grid = PiecewiseGrid::new(vec![-PI, -1.0, 1.2, PI])?;
    let (a0, a, b) = (0.5, vec![1.0, 0.0, -0.25], vec![0.3, 0.7, 0.1]);
    let f = |t: f64| a0 + (1..=3).map(|k| a[k - 1] * (k as f64 * t).cos() + b[k - 1] * (k as f64 * t).sin()).sum::<f64>();
    for bb in [0, -1] {
        let basis = PiecewiseBasis::new(grid.clone(), bb)?;
        let c = basis.trig_exact_expand(a0, &a, &b)?;
        let err = (0..500)
            .map(|i| -PI + 2.0 * PI * i as f64 / 500.0)
            .map(|t| (basis.eval(&c, t).unwrap() - f(t)).abs())
            .fold(0.0, f64::max);
        println!("b = {bb:+}: {} significant coefficients, sup error {err:.1e}", significant(&c, 1e-11));
    }
    Ok(())
}
