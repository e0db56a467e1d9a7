//! Semiclassical Jacobi polynomials: recurrence, evaluation, quadrature and
//! the b = −1 family.

use arcsem::semijacobi::{self, WeightParams};

fn main() -> arcsem::Result<()> {
    let p = WeightParams::new(1.5, 0.0, 0.0, -0.5)?;
    let rc = semijacobi::recurrence_coeffs(&p, 6)?;
    println!("weight x^a (1-x)^b (t-x)^c with {p:?}");
    println!("recurrence a = {:?}", &rc.a[..4]);
    println!("recurrence b = {:?}", &rc.b[..4]);

    // Gauss rule orthogonality check for the first few members
    let rule = semijacobi::gauss_rule(&p, 12)?;
    for (m, n) in [(0, 0), (1, 1), (2, 3), (4, 4)] {
        let ip: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| {
                let v = rc.eval_all(6, x);
                w * v[m] * v[n]
            })
            .sum();
        println!("<P_{m}, P_{n}> = {ip:+.3e}");
    }

    // b = −1: P_0 = 1, P_n vanishes at x = 1
    let pm1 = p.with(0.0, -1.0, -0.5);
    let mut e = vec![0.0; 4];
    e[3] = 1.0;
    println!("P_3^(b=-1)(1) = {:.2e}", semijacobi::evaluate(&pm1, &e, 1.0)?);
    let radau = semijacobi::gauss_radau(&p, 6)?;
    println!("Gauss-Radau nodes (pinned at 1): {:.6?}", radau.nodes);
    Ok(())
}
