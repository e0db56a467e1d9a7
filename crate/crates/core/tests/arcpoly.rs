use arcsem::arcpoly::*;
use arcsem::banded::BandedOperator;
use arcsem::quadrature::adaptive;
use arcsem::semijacobi;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rand_thetas(arc: &ArcBasis, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-arc.phi..arc.phi)).collect()
}

#[test]
fn eval_unit_vectors() {
    let arc = ArcBasis::new(0, 0.3).unwrap();
    for th in rand_thetas(&arc, 10, 1) {
        assert_eq!(arc.eval(&[1.0], th).unwrap(), 1.0);
        assert!((arc.eval(&[0.0, 1.0], th).unwrap() - th.sin()).abs() < 1e-15);
    }
}

#[test]
fn eval_matches_direct_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for b in [-1, 0] {
        let arc = ArcBasis::new(b, -0.2).unwrap();
        let c: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
        for th in rand_thetas(&arc, 10, 3) {
            let s = (1.0 - th.cos()) / (1.0 - arc.h);
            let fp: Vec<f64> = c.iter().step_by(2).copied().collect();
            let fq: Vec<f64> = c.iter().skip(1).step_by(2).copied().collect();
            let direct = semijacobi::evaluate(&arc.params_p(), &fp, s).unwrap()
                + th.sin() * semijacobi::evaluate(&arc.params_q(), &fq, s).unwrap();
            assert!((arc.eval(&c, th).unwrap() - direct).abs() < 1e-13);
        }
    }
}

#[test]
fn connection_pointwise_and_band() {
    for (b, h) in [(-1, 0.1), (0, -0.4), (-1, 0.8)] {
        let arc = ArcBasis::new(b, h).unwrap();
        let up = arc.with_b(b + 1);
        let n = 15;
        let r = arc.connection(n).unwrap();
        assert_eq!(BandedOperator::off_band_max(&r.to_dense(), 0, 2), 0.0);
        assert_eq!(r.get(0, 0), 1.0);
        for th in rand_thetas(&arc, 20, 4) {
            let lo = arc.basis_values(n, th).unwrap();
            let hi = up.basis_values(n, th).unwrap();
            let rhs = r.tmul_vec(&hi);
            for k in 0..n {
                assert!((lo[k] - rhs[k]).abs() < 1e-11, "b={b} k={k}");
            }
        }
    }
}

#[test]
fn diff_of_sine_is_cosine() {
    let arc = ArcBasis::new(0, 0.25).unwrap();
    let d = arc.diff(6).unwrap();
    let col = d.mul_vec(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    for th in rand_thetas(&arc, 10, 5) {
        assert!((arc.with_b(1).eval(&col, th).unwrap() - th.cos()).abs() < 1e-12);
    }
    let c0 = d.mul_vec(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    assert!(c0.iter().all(|&v| v == 0.0));
}

#[test]
fn diff_matches_finite_differences() {
    for (b, h) in [(-1, 0.0), (0, 0.5), (-1, -0.5)] {
        let arc = ArcBasis::new(b, h).unwrap();
        let up = arc.with_b(b + 1);
        let n = 8;
        let d = arc.diff(n + 2).unwrap();
        assert_eq!(BandedOperator::off_band_max(&d.to_dense(), 1, 3), 0.0);
        let step = 1e-6;
        for th in rand_thetas(&arc, 10, 6) {
            let th = th * 0.9;
            let vp = arc.basis_values(n, th + step).unwrap();
            let vm = arc.basis_values(n, th - step).unwrap();
            let hi = up.basis_values(n + 2, th).unwrap();
            for k in 0..n {
                let fd = (vp[k] - vm[k]) / (2.0 * step);
                let ex: f64 = (0..n + 2).map(|i| hi[i] * d.get(i, k)).sum();
                assert!((fd - ex).abs() < 1e-7 * ex.abs().max(1.0), "b={b} h={h} k={k}: {fd} vs {ex}");
            }
        }
    }
}

#[test]
fn mass_closed_forms() {
    let arc = ArcBasis::new(0, 0.0).unwrap();
    assert!((arc.m_p() - std::f64::consts::PI).abs() < 1e-15);
    assert!((arc.m_q() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    for h in [-0.5, 0.2, 0.9] {
        let arc = ArcBasis::new(0, h).unwrap();
        for j in 0..=6 {
            let mut e = vec![0.0; 2 * j + 1];
            e[2 * j] = 1.0;
            let ip = adaptive(&|t| arc.eval(&e, t).unwrap().powi(2), -arc.phi, arc.phi, 1e-15);
            assert!((ip - arc.m_p()).abs() < 1e-12 * arc.m_p(), "h={h} j={j}");
            if j >= 1 {
                let mut e = vec![0.0; 2 * j];
                e[2 * j - 1] = 1.0;
                let iq = adaptive(&|t| arc.eval(&e, t).unwrap().powi(2), -arc.phi, arc.phi, 1e-15);
                assert!((iq - arc.m_q()).abs() < 1e-12 * arc.m_q(), "h={h} j={j}");
            }
        }
    }
}

#[test]
fn derived_mass_is_congruence() {
    let arc = ArcBasis::new(-1, 0.3).unwrap();
    let m = arc.mass(9).unwrap().to_dense();
    for i in 0..9 {
        for j in 0..9 {
            let ip = adaptive(
                &|t| {
                    let v = arc.basis_values(9, t).unwrap();
                    v[i] * v[j]
                },
                -arc.phi,
                arc.phi,
                1e-14,
            );
            assert!((ip - m[(i, j)]).abs() < 1e-11, "({i},{j})");
        }
    }
}

#[test]
fn transform_simple_functions() {
    let arc = ArcBasis::new(0, 0.1).unwrap();
    let one = arc.transform(&|_| 1.0, DEFAULT_TOL).unwrap();
    assert_eq!(one.len(), 1);
    assert!((one[0] - 1.0).abs() < 1e-14);
    let s = arc.transform(&|t: f64| t.sin(), DEFAULT_TOL).unwrap();
    assert_eq!(s.len(), 2);
    assert!(s[0].abs() < 1e-13 && (s[1] - 1.0).abs() < 1e-13);
}

#[test]
fn transform_round_trip() {
    for b in [0, -1] {
        let arc = ArcBasis::new(b, -0.3).unwrap();
        let f = |t: f64| t.cos().exp();
        let c = arc.transform(&f, DEFAULT_TOL).unwrap();
        for th in rand_thetas(&arc, 50, 7) {
            assert!((arc.eval(&c, th).unwrap() - f(th)).abs() < 1e-12, "b={b}");
        }
    }
}

#[test]
fn transform_even_function_has_no_q_part() {
    let arc = ArcBasis::new(0, 0.4).unwrap();
    let c = arc.transform(&|t: f64| (t * t).cos() + t.cos().powi(3), DEFAULT_TOL).unwrap();
    for k in (1..c.len()).step_by(2) {
        assert!(c[k].abs() < 1e-12);
    }
}

#[test]
fn trig_closure() {
    let arc = ArcBasis::new(0, -0.1).unwrap();
    let f = |t: f64| 0.3 + (3.0 * t).cos() - 0.5 * (2.0 * t).sin() + 0.25 * (4.0 * t).sin();
    let c = arc.transform_fixed_b0(&f, 20).unwrap();
    for k in 9..c.len() {
        assert!(c[k].abs() < 1e-11, "slot {k}: {}", c[k]);
    }
}

#[test]
fn cos_table_reconstruction() {
    let arc = ArcBasis::new(0, 0.0).unwrap();
    let mu = arc.trig_expand_cos(1).unwrap();
    assert!((mu[0][0] / arc.m_p() - 1.0).abs() < 1e-15);
    for th in rand_thetas(&arc, 20, 8) {
        let mut c = vec![0.0; 3];
        c[0] = mu[1][0] / mu[0][0];
        c[2] = mu[1][1] / mu[0][0];
        assert!((arc.eval(&c, th).unwrap() - th.cos()).abs() < 1e-13);
    }
}

/// Projection onto p_j with an independent Gauss rule in σ.
fn project(arc: &ArcBasis, f: &dyn Fn(f64) -> f64, n: usize) -> Vec<f64> {
    let rule = semijacobi::gauss_rule(&arc.params_p(), 40).unwrap();
    let rq = semijacobi::gauss_rule(&arc.params_q(), 40).unwrap();
    let fp = arc.fam_p(n + 2).unwrap();
    let fq = arc.fam_q(n + 2).unwrap();
    let mut out = vec![0.0; 2 * n + 1];
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let t = arc.theta_of_sigma(s);
        let v = fp.rc.eval_all(n + 1, s);
        for j in 0..=n {
            out[2 * j] += w * (f(t) + f(-t)) * v[j] / arc.m_p();
        }
    }
    let omh = 1.0 - arc.h;
    for (&s, &w) in rq.nodes.iter().zip(&rq.weights) {
        let t = arc.theta_of_sigma(s);
        let v = fq.rc.eval_all(n, s);
        // ∫ f q_j dθ = 2 ∫ (odd part) sinθ P⁺ dθ, dθ = dσ/√(σ(τ−σ)), sinθ = (1−h)√(σ(τ−σ))
        let g = (f(t) - f(-t)) / t.sin();
        for j in 1..=n {
            out[2 * j - 1] += w * g * omh * omh * v[j - 1] / arc.m_q();
        }
    }
    out
}

#[test]
fn cos_and_sin_tables_match_projection() {
    let arc = ArcBasis::new(0, 0.35).unwrap();
    let mu = arc.trig_expand_cos(5).unwrap();
    let proj = project(&arc, &|t| (5.0 * t).cos(), 5);
    for j in 0..=5 {
        assert!((mu[5][j] / mu[0][0] - proj[2 * j]).abs() < 1e-11, "j={j}");
    }
    let eta = arc.trig_expand_sin(6).unwrap();
    let proj = project(&arc, &|t| (6.0 * t).sin(), 6);
    for j in 1..=6 {
        assert!((eta[6][j - 1] / arc.m_q() - proj[2 * j - 1]).abs() < 1e-11, "j={j}");
    }
}

#[test]
fn sin_table_reconstruction() {
    let arc = ArcBasis::new(0, -0.6).unwrap();
    let eta = arc.trig_expand_sin(2).unwrap();
    assert!((eta[1][0] / arc.m_q() - 1.0).abs() < 1e-15);
    let c = arc.trig_coeffs(0.0, &[], &[0.0, 1.0]).unwrap();
    for th in rand_thetas(&arc, 20, 9) {
        assert!((arc.eval(&c, th).unwrap() - (2.0 * th).sin()).abs() < 1e-13);
    }
    assert!((eta[2][0] / eta[1][0] - 2.0 * (1.0 + (arc.h - 1.0) * semijacobi::linear_coeffs(&arc.params_q()).unwrap().0)).abs() < 1e-13);
}

#[test]
fn half_range_chebyshev_orthogonality() {
    let arc = ArcBasis::new(0, 0.0).unwrap();
    for i in 0..7 {
        for j in 0..i {
            let ip = adaptive(
                &|t| {
                    let v = arc.basis_values(7, t).unwrap();
                    v[i] * v[j]
                },
                -arc.phi,
                arc.phi,
                1e-14,
            );
            assert!(ip.abs() < 1e-12, "({i},{j}) {ip}");
        }
    }
}

#[test]
fn discrete_orthogonality_on_radau_nodes() {
    let arc = ArcBasis::new(0, 0.6).unwrap();
    let n = 10;
    let rule = arc.radau(n).unwrap();
    let m = 2 * n - 1;
    let mut gram = vec![vec![0.0; m]; m];
    for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
        let t = arc.theta_of_sigma(s);
        let vp = arc.basis_values(m, t).unwrap();
        let vm = arc.basis_values(m, -t).unwrap();
        for i in 0..m {
            for j in 0..m {
                gram[i][j] += w * (vp[i] * vp[j] + vm[i] * vm[j]);
            }
        }
    }
    for i in 0..m {
        for j in 0..m {
            if i != j {
                assert!(gram[i][j].abs() < 1e-11, "({i},{j}) {}", gram[i][j]);
            }
        }
    }
}
