//! Property-based invariants across modules.

use arcsem::cli::parse_trig;
use arcsem::io::fmt_f64;
use arcsem::legendreref::LegendreBasis;
use arcsem::piecewise::{PiecewiseBasis, PiecewiseGrid};
use arcsem::structmat::{random_spd_cb3, reverse_cholesky};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Grids with 2–6 elements, every length in [0.3, π].
fn grids() -> impl Strategy<Value = PiecewiseGrid> {
    (2usize..=6)
        .prop_flat_map(|m| prop::collection::vec(-PI + 0.3..PI - 0.3, m - 1))
        .prop_filter_map("element lengths out of range", |mut cuts| {
            cuts.sort_by(f64::total_cmp);
            let mut th = vec![-PI];
            th.extend(cuts);
            th.push(PI);
            let ok = th.windows(2).all(|w| w[1] - w[0] >= 0.3 && w[1] - w[0] <= PI);
            if ok {
                PiecewiseGrid::new(th).ok()
            } else {
                None
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hats_partition_unity_and_are_periodic(grid in grids(), t in -PI..PI) {
        let m = grid.m();
        let sum: f64 = (0..m).map(|i| grid.hat_eval(i, t)).sum();
        prop_assert!((sum - 1.0).abs() < 1e-13);
        for i in 0..m {
            prop_assert!((grid.hat_eval(i, PI) - grid.hat_eval(i, -PI)).abs() < 1e-13);
            prop_assert!(grid.hat_eval(i, t) > -1e-13);
        }
    }

    #[test]
    fn arc_values_are_periodic_for_any_vector(
        grid in grids(),
        seed in any::<u64>(),
        layers in 2usize..6,
    ) {
        let basis = PiecewiseBasis::new(grid.clone(), -1).unwrap();
        let n = layers * grid.m();
        let u: Vec<f64> = (0..n).map(|k| ((seed as f64) * 1e-3 + k as f64).sin()).collect();
        let (a, b) = (basis.eval(&u, PI).unwrap(), basis.eval(&u, -PI).unwrap());
        prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn arc_mass_is_spd_and_laplacian_kills_constants(grid in grids(), layers in 2usize..6) {
        let basis = PiecewiseBasis::new(grid.clone(), -1).unwrap();
        let m = grid.m();
        let n = layers * m;
        prop_assert!(basis.mass(n).unwrap().to_dense().cholesky().is_some());
        let lap = basis.weak_laplacian(n).unwrap();
        let mut one = vec![0.0; n];
        one[..m].fill(1.0);
        let r = lap.mul_vec(&one).iter().map(|v| v.abs()).fold(0.0, f64::max);
        prop_assert!(r < 1e-12, "{}", r);
    }

    #[test]
    fn legendre_mass_is_spd_and_laplacian_kills_constants(grid in grids(), layers in 2usize..6) {
        let basis = LegendreBasis::new(grid.clone(), -1).unwrap();
        let m = grid.m();
        let n = layers * m;
        let ops = basis.operators(n).unwrap();
        prop_assert!(ops.mass.to_dense().cholesky().is_some());
        let mut one = vec![0.0; n];
        one[..m].fill(1.0);
        let r = ops.laplacian.mul_vec(&one).iter().map(|v| v.abs()).fold(0.0, f64::max);
        prop_assert!(r < 1e-12, "{}", r);
    }

    #[test]
    fn transform_round_trip(grid in grids(), k in 1usize..4, shift in -1.0f64..1.0, t in -PI..PI) {
        let f = |x: f64| (k as f64 * x + shift).cos() + 0.5 * x.sin().exp();
        for b in [0, -1] {
            let basis = PiecewiseBasis::new(grid.clone(), b).unwrap();
            let c = basis.transform(&f, 1e-14).unwrap();
            prop_assert!((basis.eval(&c, t).unwrap() - f(t)).abs() < 1e-11);
        }
    }

    #[test]
    fn reverse_cholesky_solves(m in 3usize..8, p in 4usize..40, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_spd_cb3(m, p, &mut rng);
        let fac = reverse_cholesky(&a).unwrap();
        prop_assert!(fac.is_structured());
        let x_true: Vec<f64> = (0..a.dim()).map(|i| (i as f64 * 0.37).cos()).collect();
        let x = fac.solve(&a.mul_vec(&x_true)).unwrap();
        let err = x.iter().zip(&x_true).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10, "{}", err);
    }
}

proptest! {
    #[test]
    fn float_formatting_round_trips(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let s = fmt_f64(v);
        prop_assert_eq!(s.parse::<f64>().unwrap(), v);
    }

    #[test]
    fn trig_spec_round_trips(a0 in -5.0f64..5.0, a in prop::collection::vec(-5.0f64..5.0, 0..4), b in prop::collection::vec(-5.0f64..5.0, 0..4)) {
        let mut parts = vec![format!("a0={a0:e}")];
        parts.extend(a.iter().enumerate().map(|(k, v)| format!("a{}={v:e}", k + 1)));
        parts.extend(b.iter().enumerate().map(|(k, v)| format!("b{}={v:e}", k + 1)));
        let (pa0, pa, pb) = parse_trig(&parts.join(",")).unwrap();
        prop_assert_eq!(pa0, a0);
        prop_assert_eq!(pa, a);
        prop_assert_eq!(pb, b);
    }
}
