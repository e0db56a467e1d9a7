use arcsem::sparse::SparseMat;
use arcsem::structmat::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn identity_times_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_cb3(4, 5, &mut rng);
    let i = CB3Arrowhead::identity(4, 5);
    let prod = a.multiply(&i).unwrap();
    assert_eq!(prod.to_dense(), a.to_dense());
}

#[test]
fn product_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        // the transpose has diagonal C blocks, so the product stays CB3
        let a = random_cb3(5, 6, &mut rng).transpose();
        let b = random_cb3(5, 6, &mut rng);
        let c = a.multiply(&b).unwrap();
        let dense = a.to_dense() * b.to_dense();
        assert!((c.to_dense() - &dense).norm() <= 1e-12 * dense.norm());
        assert!(c.respects_structure());
        assert!(c.block_lower <= a.block_lower + b.block_lower);
        assert!(c.block_upper <= a.block_upper + b.block_upper);
    }
}

#[test]
fn cyclic_one_one_blocks_multiply_to_two_two() {
    let m = 7;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut t = vec![];
    for i in 0..m {
        for d in [m - 1, 0, 1] {
            t.push((i, (i + d) % m, rng.random_range(0.5..1.0)));
        }
    }
    let a = CyclicBanded::from_sparse(SparseMat::from_triplets(m, m, t));
    assert_eq!((a.lower, a.upper), (1, 1));
    let b = a.matmul(&a);
    assert_eq!((b.lower, b.upper), (2, 2));
    assert!(b.respects_band());
}

#[test]
fn fill_in_outside_the_class_is_reported() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let a = random_cb3(4, 5, &mut rng);
    assert!(a.multiply(&a).is_err());
}

#[test]
fn shape_mismatch_is_reported() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = random_cb3(3, 4, &mut rng);
    let b = random_cb3(4, 3, &mut rng);
    assert!(a.multiply(&b).is_err());
}

#[test]
fn factor_identity_and_diagonal() {
    let i = CB3Arrowhead::identity(4, 6);
    let f = reverse_cholesky(&i).unwrap();
    assert_eq!(f.l_matrix().to_dense(), i.to_dense());
    let n = 28;
    let d: Vec<f64> = (0..n).map(|k| ((k + 2) * (k + 2)) as f64).collect();
    let a = CB3Arrowhead::from_sparse(&SparseMat::diag(&d), 4).unwrap();
    let l = reverse_cholesky(&a).unwrap().l_matrix();
    for k in 0..n {
        assert!((l.get(k, k) - (k + 2) as f64).abs() < 1e-14);
    }
}

#[test]
fn random_spd_factor_and_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let m = rng.random_range(3..=8);
        let p = rng.random_range(4..=20);
        let a = random_spd_cb3(m, p, &mut rng);
        assert_eq!((a.block_lower, a.block_upper), (2, 2));
        let f = reverse_cholesky(&a).unwrap();
        assert!(f.is_structured());
        let l = f.l_matrix();
        let res = l.transpose().matmul(&l).add_scaled(&a.to_sparse(), -1.0).frobenius();
        assert!(res <= 1e-12 * a.to_sparse().frobenius());
        let ones = vec![1.0; a.dim()];
        let x = f.solve(&a.mul_vec(&ones)).unwrap();
        assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-11));
        let rhs: Vec<f64> = (0..a.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = f.solve(&rhs).unwrap();
        let ax = a.mul_vec(&x);
        let r: f64 = ax.iter().zip(&rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let nr: f64 = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(r <= 1e-11 * nr);
    }
}

#[test]
fn factor_sparsity_pattern() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = random_spd_cb3(6, 10, &mut rng);
    let f = reverse_cholesky(&a).unwrap();
    let l = f.l_matrix();
    let m = 6;
    for (i, j, _) in l.iter() {
        assert!(i >= j, "L is lower triangular");
        let (bi, bj) = (i / m, j / m);
        // tail-tail: diagonal blocks within block bandwidth 2
        if bi > 0 && bj > 0 {
            assert_eq!(i % m, j % m);
            assert!(bi - bj <= 2);
        }
        // tail-head coupling confined to the first two tail blocks
        if bi > 0 && bj == 0 {
            assert!(bi <= 2);
        }
    }
}

#[test]
fn non_spd_reports_pivot() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = random_spd_cb3(4, 6, &mut rng);
    let neg = a.to_sparse().add_scaled(&SparseMat::identity(a.dim()), -1e6);
    let bad = CB3Arrowhead::from_sparse(&neg, 4).unwrap();
    match reverse_cholesky(&bad) {
        Err(arcsem::Error::NotPositiveDefinite { index, .. }) => assert!(index < a.dim()),
        other => panic!("expected a pivot error, got {other:?}"),
    }
}

#[test]
fn solve_rejects_wrong_length() {
    let f = reverse_cholesky(&CB3Arrowhead::identity(3, 3)).unwrap();
    assert!(f.solve(&[1.0; 5]).is_err());
}

#[test]
fn dense_fallback_for_degenerate_shapes() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = random_spd_cb3(2, 5, &mut rng);
    let f = reverse_cholesky(&a).unwrap();
    assert!(!f.is_structured());
    let rhs = vec![1.0; a.dim()];
    let x = f.solve(&rhs).unwrap();
    let ax = a.mul_vec(&x);
    assert!(ax.iter().all(|v| (v - 1.0).abs() < 1e-10));
}

#[test]
fn operation_count_is_linear_in_p() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = 5;
    let ps = [8usize, 16, 32, 64, 128];
    let ops: Vec<f64> = ps
        .iter()
        .map(|&p| reverse_cholesky(&random_spd_cb3(m, p, &mut rng)).unwrap().ops as f64)
        .collect();
    // straight-line fit through (p, ops)
    let n = ps.len() as f64;
    let xs: Vec<f64> = ps.iter().map(|&p| p as f64).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ops.iter().sum::<f64>() / n;
    let slope = xs.iter().zip(&ops).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let icpt = my - slope * mx;
    for (x, y) in xs.iter().zip(&ops) {
        assert!((icpt + slope * x - y).abs() <= 0.1 * y, "ops {y} off the line");
    }
}

#[test]
fn json_round_trip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let a = random_spd_cb3(4, 7, &mut rng);
    let s = a.to_json().unwrap();
    let b = CB3Arrowhead::from_json(&s).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sections() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = random_cb3(4, 8, &mut rng);
    assert_eq!(a.section(8).unwrap().to_dense(), a.to_dense());
    let s = a.section(3).unwrap();
    assert_eq!(s.to_dense(), a.to_dense().view((0, 0), (16, 16)).into_owned());
    let d = SparseMat::diag(&(0..20).map(|k| k as f64).collect::<Vec<_>>());
    let da = CB3Arrowhead::from_sparse(&d, 4).unwrap();
    let ds = da.section(2).unwrap();
    for k in 0..12 {
        assert_eq!(ds.to_dense()[(k, k)], k as f64);
    }
    // section of a product agrees with the product of sections away from the boundary
    let b = random_cb3(4, 8, &mut rng);
    let full = a.transpose().multiply(&b).unwrap().section(5).unwrap().to_dense();
    let part = a.transpose().section(5).unwrap().to_dense() * b.section(5).unwrap().to_dense();
    let keep = 4 * 5;
    assert!((full.view((0, 0), (keep, keep)) - part.view((0, 0), (keep, keep))).norm() < 1e-12);
}
