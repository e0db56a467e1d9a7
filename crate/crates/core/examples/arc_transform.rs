//! Orthogonal polynomials on a single arc: adaptive transform, evaluation
//! and the banded connection / differentiation operators.

use arcsem::arcpoly::{split, ArcBasis, DEFAULT_TOL};

fn main() -> arcsem::Result<()> {
    let arc = ArcBasis::new(0, 0.3)?;
    println!("arc h = {}, half-angle φ = {:.6}, mass m_p = {:.6}, m_q = {:.6}", arc.h, arc.phi, arc.m_p(), arc.m_q());

    let f = |t: f64| (t.cos()).exp() * (1.0 + 0.5 * t.sin());
    let c = arc.transform(&f, DEFAULT_TOL)?;
    let (p, q) = split(&c);
    println!("{} coefficients ({} p, {} q)", c.len(), p.len(), q.len());
    for t in [-arc.phi, -0.4, 0.0, 0.9] {
        println!("θ = {t:+.4}: f = {:.15}, expansion error = {:.1e}", f(t), arc.eval(&c, t)? - f(t));
    }

    // the derivative lands in the b = 1 basis; pad so no output row is cut
    let mut cp = c.clone();
    cp.resize(c.len() + 2, 0.0);
    let dc = arc.diff(cp.len())?.mul_vec(&cp);
    let upper = arc.with_b(1);
    let t: f64 = 0.25;
    let exact = (t.cos()).exp() * (-t.sin() * (1.0 + 0.5 * t.sin()) + 0.5 * t.cos());
    println!("derivative at θ = {t}: {:.15} (exact {exact:.15})", upper.eval(&dc, t)?);
    Ok(())
}
