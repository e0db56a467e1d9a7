//! Multiplication by a(θ) as a banded operator on one arc and as a
//! block-diagonal sparse matrix on the piecewise basis.

use arcsem::arcpoly::{ArcBasis, DEFAULT_TOL};
use arcsem::multop;
use arcsem::piecewise::{PiecewiseBasis, PiecewiseGrid};

fn main() -> arcsem::Result<()> {
    let arc = ArcBasis::new(0, -0.2)?;
    let a = arc.transform(&|t: f64| t.cos(), DEFAULT_TOL)?;
    let ja = multop::multiplication_matrix(&arc, &a, 12)?;
    println!("cos θ on one arc: {} coefficients, operator bandwidths ({}, {})", a.len(), ja.lower, ja.upper);

    let f = arc.transform(&|t: f64| t.sin(), DEFAULT_TOL)?;
    let mut fp = f.clone();
    fp.resize(12, 0.0);
    let prod = ja.mul_vec(&fp);
    let t = 0.4;
    println!("(cos·sin)(0.4) = {:.15} vs {:.15}", arc.eval(&prod, t)?, t.cos() * t.sin());

    let basis = PiecewiseBasis::new(PiecewiseGrid::uniform(4)?, 0)?;
    let mat = basis.mult(&|t: f64| (t.sin()).exp(), 30)?;
    println!("exp(sin θ) on the b = 0 piecewise basis: 30×30 with {} non-zeros", mat.nnz());
    Ok(())
}
