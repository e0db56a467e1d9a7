//! Reverse Cholesky factorisation of cyclic block-banded arrowhead (CB³)
//! matrices: accuracy and linear operation counts.

use arcsem::structmat::{random_spd_cb3, reverse_cholesky};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> arcsem::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    println!("{:>6} {:>6} {:>8} {:>12} {:>12}", "m", "p", "N", "ops", "residual");
    for (m, p) in [(4, 16), (4, 64), (4, 256), (8, 256)] {
        let a = random_spd_cb3(m, p, &mut rng);
        let fac = reverse_cholesky(&a)?;
        let rhs: Vec<f64> = (0..a.dim()).map(|i| (i as f64).sin()).collect();
        let x = fac.solve(&rhs)?;
        let r = a.mul_vec(&x).iter().zip(&rhs).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        println!("{m:>6} {p:>6} {:>8} {:>12} {r:>12.1e}", a.dim(), fac.ops);
    }
    Ok(())
}
