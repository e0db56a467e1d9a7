use arcsem::piecewise::*;
use arcsem::quadrature::adaptive;
use arcsem::structmat::reverse_cholesky;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn grid3() -> PiecewiseGrid {
    PiecewiseGrid::new(vec![-PI, -PI / 3.0, PI / 3.0, PI]).unwrap()
}

fn odd_grid() -> PiecewiseGrid {
    PiecewiseGrid::new(vec![-PI, -2.0, -0.3, 0.9, 2.2, PI]).unwrap()
}

fn thetas(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-PI..PI)).collect()
}

fn unit(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

/// ∫_{-π}^{π} f, split at the breakpoints.
fn integrate(grid: &PiecewiseGrid, f: &dyn Fn(f64) -> f64) -> f64 {
    (0..grid.m())
        .map(|e| {
            // stay strictly inside so element lookup is unambiguous
            let (a, b) = (grid.theta[e], grid.theta[e + 1]);
            let eps = 1e-15 * (b - a);
            adaptive(f, a + eps, b - eps, 1e-15)
        })
        .sum()
}

#[test]
fn grid_validation() {
    assert!(PiecewiseGrid::new(vec![-PI, PI]).is_err());
    assert!(PiecewiseGrid::new(vec![-PI, 0.5, 0.2, PI]).is_err());
    assert!(PiecewiseGrid::new(vec![-PI, 0.5, PI - 0.1]).is_err());
    assert!(PiecewiseGrid::new(vec![-PI, 1.0, PI]).is_err(), "element longer than pi");
    assert_eq!(PiecewiseGrid::uniform(10).unwrap().m(), 9);
    assert_eq!(PiecewiseGrid::parse("uniform:4").unwrap().m(), 3);
    let g = PiecewiseGrid::parse("-3.14159265358979, 0, 3.14159265358979").unwrap();
    assert_eq!(g.m(), 2);
    assert!(PiecewiseGrid::parse("a,b").is_err());
}

#[test]
fn element_lookup_convention() {
    let g = grid3();
    assert_eq!(g.element_of(-PI), 0);
    assert_eq!(g.element_of(-PI / 3.0), 1);
    assert_eq!(g.element_of(PI / 3.0), 2);
    assert_eq!(g.element_of(PI), 2);
}

#[test]
fn hats_interpolate_and_partition_unity() {
    for g in [grid3(), odd_grid()] {
        let m = g.m();
        for i in 0..m {
            for j in 0..m {
                let v = g.hat_eval(i, g.theta[j]);
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14, "{i} {j} {v}");
            }
            // θ = π is the same point as −π
            assert!((g.hat_eval(i, PI) - if i == 0 { 1.0 } else { 0.0 }).abs() < 1e-14);
        }
        for th in thetas(50, 1) {
            let s: f64 = (0..m).map(|i| g.hat_eval(i, th)).sum();
            assert!((s - 1.0).abs() < 1e-13);
        }
    }
}

#[test]
fn three_element_hats_are_bumps() {
    let g = grid3();
    for i in 0..3 {
        let peak = (0..=600)
            .map(|k| -PI + 2.0 * PI * k as f64 / 600.0)
            .map(|t| g.hat_eval(i, t))
            .fold(f64::MIN, f64::max);
        assert!((peak - 1.0).abs() < 1e-12);
    }
}

#[test]
fn basis_hats_match_hat_eval() {
    let g = odd_grid();
    let basis = PiecewiseBasis::new(g.clone(), -1).unwrap();
    let n = 3 * g.m();
    for th in thetas(40, 2) {
        for i in 0..g.m() {
            let v = basis.eval(&unit(n, i), th).unwrap();
            assert!((v - g.hat_eval(i, th)).abs() < 1e-13);
        }
    }
}

#[test]
fn constant_and_bubble_support() {
    let g = odd_grid();
    let m = g.m();
    let basis = PiecewiseBasis::new(g.clone(), -1).unwrap();
    let mut ones = vec![0.0; 4 * m];
    ones[..m].iter_mut().for_each(|v| *v = 1.0);
    for th in thetas(30, 3) {
        assert!((basis.eval(&ones, th).unwrap() - 1.0).abs() < 1e-14);
    }
    // bubble slot of element 2
    let c = unit(4 * m, 2 * m + 2);
    for th in thetas(200, 4) {
        if g.element_of(th) != 2 {
            assert!(basis.eval(&c, th).unwrap().abs() < 1e-15);
        }
    }
    for t in [g.theta[2], g.theta[3]] {
        assert!(basis.eval(&c, t).unwrap().abs() < 1e-13);
    }
}

#[test]
fn b0_step_function_is_reproduced() {
    let g = PiecewiseGrid::uniform(10).unwrap();
    let basis = PiecewiseBasis::new(g.clone(), 0).unwrap();
    let f = |t: f64| 2.0 + (t.abs() - PI / 3.0).signum();
    let c = basis.transform(&f, 1e-14).unwrap();
    assert_eq!(significant(&c, 1e-12), 9);
    for e in 0..g.m() {
        let mid = g.center(e);
        assert!((basis.eval(&c, mid).unwrap() - f(mid)).abs() < 1e-13);
    }
    // both one-sided values at θ = π/3 (element boundary)
    let e = g.element_of(PI / 3.0);
    assert!((basis.eval(&c, PI / 3.0 + 1e-9).unwrap() - 3.0).abs() < 1e-12);
    assert!((basis.eval(&c, g.theta[e] - 1e-9).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn mass_b0_uniform_and_quadrature() {
    let g = PiecewiseGrid::uniform(5).unwrap();
    let basis = PiecewiseBasis::new(g.clone(), 0).unwrap();
    let d = basis.mass_b0_diag(12).unwrap();
    for s in 0..3 {
        for e in 1..4 {
            assert_eq!(d[s * 4 + e], d[s * 4]);
        }
    }
    // −1 basis: entries vs quadrature of products
    let g = odd_grid();
    let bm = PiecewiseBasis::new(g.clone(), -1).unwrap();
    let n = 4 * g.m();
    let mass = bm.mass(n).unwrap().to_dense();
    for (i, j) in [(0, 0), (0, 1), (1, 1), (0, 4), (2, 6), (5, 10), (7, 12), (9, 19), (4, 0), (12, 17)] {
        let (ui, uj) = (unit(n, i), unit(n, j));
        let q = integrate(&g, &|t| bm.eval(&ui, t).unwrap() * bm.eval(&uj, t).unwrap());
        assert!((mass[(i, j)] - q).abs() < 1e-12 * (1.0 + q.abs()), "({i},{j}) {} vs {q}", mass[(i, j)]);
    }
}

#[test]
fn mass_is_spd_and_cb3() {
    let bm = PiecewiseBasis::new(odd_grid(), -1).unwrap();
    let m = bm.mass_cb3(40).unwrap();
    assert!(m.respects_structure());
    assert_eq!((m.block_lower, m.block_upper), (2, 2));
    assert!(reverse_cholesky(&m).is_ok());
    let r = bm.connection(40).unwrap();
    assert!(r.respects_structure());
    assert_eq!((r.block_lower, r.block_upper), (1, 1));
}

#[test]
fn connection_pointwise() {
    for g in [grid3(), odd_grid()] {
        let bm = PiecewiseBasis::new(g.clone(), -1).unwrap();
        let b0 = PiecewiseBasis::new(g.clone(), 0).unwrap();
        let n = 6 * g.m();
        let r = bm.connection_rect(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let u0 = r.mul_vec(&u);
        for th in thetas(30, 6) {
            let a = bm.eval(&u, th).unwrap();
            let b = b0.eval(&u0, th).unwrap();
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
        }
    }
}

#[test]
fn connection_head_blocks_closed_forms() {
    let g = odd_grid();
    let m = g.m();
    let bm = PiecewiseBasis::new(g.clone(), -1).unwrap();
    let r = bm.connection_rect(3 * m).unwrap().to_dense();
    for e in 0..m {
        let l = g.length(e);
        let a = g.arc(e, 0).unwrap();
        // P₀₂ᵀH: ℓ_e/2 for both hats of element e
        assert!((r[(e, e)] * a.m_p() - l / 2.0).abs() < 1e-13);
        assert!((r[(e, (e + 1) % m)] * a.m_p() - l / 2.0).abs() < 1e-13);
        // P₁₁ᵀH: ∓ξ/4 with ξ = (sin ℓ − ℓ)/sin(ℓ/2)
        let xi = (l.sin() - l) / (l / 2.0).sin();
        assert!((r[(m + e, e)] * a.m_q() - xi / 4.0).abs() < 1e-13);
        assert!((r[(m + e, (e + 1) % m)] * a.m_q() + xi / 4.0).abs() < 1e-13);
    }
    // uniform grid: ξ identical on every element
    let g = PiecewiseGrid::uniform(4).unwrap();
    let r = PiecewiseBasis::new(g, -1).unwrap().connection_rect(9).unwrap().to_dense();
    for e in 1..3 {
        assert!((r[(3 + e, e)] - r[(3, 0)]).abs() < 1e-15);
    }
}

#[test]
fn diff_of_constant_and_sine() {
    let g = odd_grid();
    let m = g.m();
    let bm = PiecewiseBasis::new(g.clone(), -1).unwrap();
    let b0 = PiecewiseBasis::new(g.clone(), 0).unwrap();
    let n = 4 * m;
    let d = bm.diff_rect(n).unwrap();
    let mut ones = vec![0.0; n];
    ones[..m].iter_mut().for_each(|v| *v = 1.0);
    assert!(d.mul_vec(&ones).iter().all(|v| v.abs() < 1e-12));
    let s = bm.trig_exact_expand(0.0, &[], &[1.0]).unwrap();
    let mut sp = s.clone();
    sp.resize(n, 0.0);
    let ds = d.mul_vec(&sp);
    for th in thetas(30, 7) {
        assert!((b0.eval(&ds, th).unwrap() - th.cos()).abs() < 1e-10);
    }
    assert!(bm.diff(n).unwrap().respects_structure());
}

#[test]
fn diff_finite_differences() {
    let g = odd_grid();
    let bm = PiecewiseBasis::new(g.clone(), -1).unwrap();
    let b0 = PiecewiseBasis::new(g.clone(), 0).unwrap();
    let n = 5 * g.m();
    let d = bm.diff_rect(n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let du = d.mul_vec(&u);
        for th in thetas(10, rng.random()) {
            let e = g.element_of(th);
            if (th - g.theta[e]).abs() < 1e-4 || (g.theta[e + 1] - th).abs() < 1e-4 {
                continue;
            }
            let hs = 1e-6;
            let fd = (bm.eval(&u, th + hs).unwrap() - bm.eval(&u, th - hs).unwrap()) / (2.0 * hs);
            let ex = b0.eval(&du, th).unwrap();
            assert!((fd - ex).abs() < 1e-6 * (1.0 + ex.abs()), "{fd} vs {ex}");
        }
    }
}

#[test]
fn weak_laplacian_properties() {
    let g = odd_grid();
    let m = g.m();
    let bm = PiecewiseBasis::new(g.clone(), -1).unwrap();
    let n = 8 * m;
    let lap = bm.weak_laplacian(n).unwrap();
    assert!(lap.respects_structure());
    let dense = lap.to_dense();
    let asym = (&dense - dense.transpose()).norm();
    assert!(asym <= 1e-13 * dense.norm());
    let mut ones = vec![0.0; n];
    ones[..m].iter_mut().for_each(|v| *v = 1.0);
    assert!(lap.mul_vec(&ones).iter().all(|v| v.abs() < 1e-11));
    // quadratic form of sin θ equals ∫ cos² = π
    let mut s = bm.trig_exact_expand(0.0, &[], &[1.0]).unwrap();
    s.resize(n, 0.0);
    let q: f64 = s.iter().zip(lap.mul_vec(&s)).map(|(a, b)| a * b).sum();
    assert!((q - PI).abs() < 1e-10);
}

#[test]
fn transform_b_minus1() {
    let g = odd_grid();
    let m = g.m();
    let bm = PiecewiseBasis::new(g.clone(), -1).unwrap();
    let one = bm.transform(&|_| 1.0, 1e-14).unwrap();
    assert_eq!(one.len(), m);
    assert!(one.iter().all(|v| (v - 1.0).abs() < 1e-14));
    let f = |t: f64| (-t.cos()).exp();
    let c = bm.transform(&f, 1e-14).unwrap();
    let err = thetas(100, 9).into_iter().map(|t| (bm.eval(&c, t).unwrap() - f(t)).abs()).fold(0.0, f64::max);
    assert!(err < 1e-11, "{err}");
}

#[test]
fn trig_exact_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for g in [grid3(), odd_grid(), PiecewiseGrid::uniform(3).unwrap()] {
        let m = g.m();
        for big_n in [0usize, 1, 3] {
            let a: Vec<f64> = (0..big_n).map(|_| rng.random_range(0.5..1.5)).collect();
            let b: Vec<f64> = (0..big_n).map(|_| rng.random_range(0.5..1.5)).collect();
            let f = |t: f64| {
                0.7 + (1..=big_n).map(|k| a[k - 1] * (k as f64 * t).cos() + b[k - 1] * (k as f64 * t).sin()).sum::<f64>()
            };
            for (bb, expect) in [(0, m * (2 * big_n + 1)), (-1, m * (2 * big_n).max(1))] {
                let basis = PiecewiseBasis::new(g.clone(), bb).unwrap();
                let c = basis.trig_exact_expand(0.7, &a, &b).unwrap();
                assert_eq!(significant(&c, 1e-11), expect, "b={bb} N={big_n} M={m}");
                assert!(c.len() <= expect.max(m));
                for t in thetas(50, 11) {
                    assert!((basis.eval(&c, t).unwrap() - f(t)).abs() < 1e-12);
                }
            }
        }
    }
    // cos 3θ, three elements, b = 0 → M(2N+1) = 21 slots. On this grid cos 3θ
    // is even about each element centre with zero element mean, so the q-slots
    // and the p₀ slots vanish identically and only 9 entries are non-zero.
    let basis = PiecewiseBasis::new(grid3(), 0).unwrap();
    let c = basis.trig_exact_expand(0.0, &[0.0, 0.0, 1.0], &[]).unwrap();
    assert_eq!(c.len(), 21);
    assert_eq!(significant(&c, 1e-12), 9);
    for t in thetas(100, 15) {
        assert!((basis.eval(&c, t).unwrap() - (3.0 * t).cos()).abs() < 1e-12);
    }
}

#[test]
fn translation_keeps_cos_degree_one() {
    let g = odd_grid();
    let basis = PiecewiseBasis::new(g.clone(), 0).unwrap();
    let c = basis.transform(&|t: f64| t.cos(), 1e-14).unwrap();
    // p₀, q₁, p₁ per element only
    assert!(c.len() <= 3 * g.m());
}

#[test]
fn derivative_reconstruction_periodic() {
    let g = odd_grid();
    let bm = PiecewiseBasis::new(g.clone(), -1).unwrap();
    let u = bm.transform(&|t: f64| (t.sin()).exp(), 1e-14).unwrap();
    let sec = 15 * g.m();
    for d in 0..=2 {
        let a = bm.eval_derivative(&u, d, sec, -PI).unwrap();
        let b = bm.eval_derivative(&u, d, sec, PI).unwrap();
        assert!((a - b).abs() < 1e-9, "d={d}: {a} vs {b}");
    }
    // second derivative of e^{sin θ}: (cos² − sin) e^{sin}
    for t in thetas(20, 12) {
        let ex = (t.cos().powi(2) - t.sin()) * t.sin().exp();
        assert!((bm.eval_derivative(&u, 2, sec, t).unwrap() - ex).abs() < 1e-9);
    }
}

#[test]
fn value_periodic_for_any_vector_and_slope_for_trig() {
    let g = odd_grid();
    let bm = PiecewiseBasis::new(g.clone(), -1).unwrap();
    let n = 6 * g.m();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..10 {
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert!((bm.eval(&u, PI).unwrap() - bm.eval(&u, -PI).unwrap()).abs() < 1e-12);
    }
    let u = bm.trig_exact_expand(0.3, &[0.2, -1.0], &[0.5, 0.7]).unwrap();
    let (a, b) = (bm.eval_derivative(&u, 1, n, PI).unwrap(), bm.eval_derivative(&u, 1, n, -PI).unwrap());
    assert!((a - b).abs() < 1e-11);
}

#[test]
fn mult_pointwise() {
    let g = odd_grid();
    let b0 = PiecewiseBasis::new(g.clone(), 0).unwrap();
    let n = 12 * g.m();
    let id = b0.mult(&|_| 1.0, n).unwrap().to_dense();
    assert!((id - nalgebra::DMatrix::<f64>::identity(n, n)).norm() < 1e-13);
    let v = |t: f64| -t.sin() / 1000.0 + 0.3 * t.cos();
    let j = b0.mult(&v, n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut u: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    // leave room for the band at the truncation edge
    u[n - 4 * g.m()..].iter_mut().for_each(|x| *x = 0.0);
    let ju = j.mul_vec(&u);
    for t in thetas(30, 14) {
        let lhs = v(t) * b0.eval(&u, t).unwrap();
        assert!((lhs - b0.eval(&ju, t).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn hats_on_half_circle_elements() {
    let g = PiecewiseGrid::new(vec![-PI, 0.0, PI]).unwrap();
    // ½(1 ± sin(c − θ)) with c = ∓π/2
    for t in [-2.5, -PI / 2.0, -0.3, 0.4, PI / 2.0, 2.9] {
        let e = if t < 0.0 { 0 } else { 1 };
        let c = if t < 0.0 { -PI / 2.0 } else { PI / 2.0 };
        let want = 0.5 * (1.0 + (c - t).sin());
        assert!((g.hat_eval(e, t) - want).abs() < 1e-15, "θ={t}");
        assert!((g.hat_eval(e, t) + g.hat_eval((e + 1) % 2, t) - 1.0).abs() < 1e-15);
    }
}
