//! The periodic integrated-Legendre reference basis used for comparisons.

use arcsem::legendreref::LegendreBasis;
use arcsem::piecewise::PiecewiseGrid;

fn main() -> arcsem::Result<()> {
    let grid = PiecewiseGrid::uniform(5)?;
    let basis = LegendreBasis::new(grid, -1)?;
    let f = |t: f64| 1.0 / (2.0 + t.cos());
    let c = basis.transform(&f, 1e-14)?;
    println!("1/(2 + cos θ): {} coefficients", c.len());
    println!("value at 0.7: {:.15} (exact {:.15})", basis.eval(&c, 0.7), f(0.7));
    let ops = basis.operators(20)?;
    println!(
        "n = 20: mass {} non-zeros, Laplacian {} non-zeros",
        ops.mass.nnz(),
        ops.laplacian.nnz()
    );
    Ok(())
}
