use geomed::oracles::weiszfeld_reference;
use geomed::rng::seeded;
use geomed::{eval_f, mean_point, normalize, GeomedError, PointSet, SolverConfig};
use proptest::prelude::*;
use rand::Rng;

fn pts(rows: &[&[f64]]) -> PointSet<f64> {
    PointSet::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn eval_f_examples() {
    assert_eq!(eval_f(&pts(&[&[0.0, 0.0], &[2.0, 0.0]]), &[1.0, 0.0]).unwrap(), 2.0);
    assert_eq!(eval_f(&pts(&[&[1.0, 1.0]]), &[1.0, 1.0]).unwrap(), 0.0);
    assert_eq!(eval_f(&pts(&[&[0.0, 0.0], &[1.0, 0.0], &[10.0, 0.0]]), &[1.0, 0.0]).unwrap(), 10.0);
    assert!(matches!(
        eval_f(&pts(&[&[0.0, 0.0]]), &[1.0]),
        Err(GeomedError::DimensionMismatch { .. })
    ));
}

#[test]
fn mean_examples() {
    assert_eq!(mean_point(&pts(&[&[0.0, 0.0], &[2.0, 0.0]])), vec![1.0, 0.0]);
    assert_eq!(mean_point(&pts(&[&[1.0, 1.0]])), vec![1.0, 1.0]);
    let square = pts(&[&[1.0, 1.0], &[-1.0, 1.0], &[1.0, -1.0], &[-1.0, -1.0]]);
    assert_eq!(mean_point(&square), vec![0.0, 0.0]);
}

#[test]
fn normalize_examples() {
    let same = pts(&[&[2.0, -3.0], &[2.0, -3.0], &[2.0, -3.0]]);
    let (_, norm) = normalize(&same);
    assert_eq!(norm.shift, vec![2.0, -3.0]);
    assert_eq!(norm.scale, 1.0);

    // Lower middle order statistic: shift (0,0); mean (1,0) has f = 2 = n.
    let (moved, norm) = normalize(&pts(&[&[0.0, 0.0], &[2.0, 0.0]]));
    assert_eq!(norm.shift, vec![0.0, 0.0]);
    assert_eq!(norm.scale, 1.0);
    let m = mean_point(&moved);
    assert!((eval_f(&moved, &m).unwrap() / 2.0 - 1.0).abs() < 1e-15);
}

#[test]
fn zero_weights_are_dropped() {
    let ps = pts(&[&[0.0], &[5.0], &[9.0]]).with_weights(vec![1.0, 0.0, 2.0]).unwrap();
    assert_eq!(ps.len(), 2);
    assert_eq!(ps.point(1), &[9.0]);
    assert!(pts(&[&[0.0]]).with_weights(vec![0.0]).is_err());
    assert!(pts(&[&[0.0]]).with_weights(vec![-1.0]).is_err());
    assert!(PointSet::new(vec![0.0, f64::NAN], 2).is_err());
}

#[test]
fn config_invariants() {
    assert!(SolverConfig::<f64>::practical(0.0).is_err());
    assert!(SolverConfig::<f64>::practical(1.0).is_err());
    let mut cfg = SolverConfig::<f64>::paper_faithful(0.1).unwrap();
    assert_eq!(cfg.step_factor, 1.0 / 600.0);
    cfg.step_factor = 1.0 / 60.0;
    assert!(cfg.validate().is_err());
    for mode_cfg in [SolverConfig::<f64>::paper_faithful(0.01).unwrap(), SolverConfig::practical(0.01).unwrap()] {
        for n in [1.0, 10.0, 1e3, 1e6] {
            let tol = mode_cfg.tolerances(n);
            assert!(tol.eps_c <= (tol.eps_v / 36.0).powf(1.5) * (1.0 + 1e-12));
            assert!((tol.eps_star - 0.01 / 3.0).abs() < 1e-18);
        }
    }
}

#[test]
fn mean_is_a_two_approximation() {
    let mut rng = seeded(2024);
    for _ in 0..1000 {
        let n = rng.random_range(1..=20);
        let d = rng.random_range(1..=4);
        let coords: Vec<f64> = (0..n * d).map(|_| rng.random_range(-10.0..10.0)).collect();
        let ps = PointSet::new(coords, d).unwrap();
        let f_ref = weiszfeld_reference(&ps, 1e-12).unwrap().objective;
        let f_mean = eval_f(&ps, &mean_point(&ps)).unwrap();
        assert!(f_mean <= 2.0 * f_ref * (1.0 + 1e-12) + 1e-12, "{f_mean} vs {f_ref}");
    }
}

fn instance() -> impl Strategy<Value = (PointSet<f64>, Vec<f64>)> {
    (1usize..6, 1usize..12).prop_flat_map(|(d, n)| {
        (
            prop::collection::vec(-100.0f64..100.0, n * d).prop_map(move |c| PointSet::new(c, d).unwrap()),
            prop::collection::vec(-100.0f64..100.0, d),
        )
    })
}

proptest! {
    #[test]
    fn translation_equivariant((ps, x) in instance(), shift in -50.0f64..50.0) {
        let moved = PointSet::new(ps.coords().iter().map(|c| c + shift).collect(), ps.dim()).unwrap();
        let y: Vec<f64> = x.iter().map(|v| v + shift).collect();
        let (a, b) = (eval_f(&ps, &x).unwrap(), eval_f(&moved, &y).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn scale_homogeneous((ps, x) in instance(), s in 1e-3f64..1e3) {
        let scaled = PointSet::new(ps.coords().iter().map(|c| c * s).collect(), ps.dim()).unwrap();
        let y: Vec<f64> = x.iter().map(|v| v * s).collect();
        let (a, b) = (eval_f(&ps, &x).unwrap(), eval_f(&scaled, &y).unwrap());
        prop_assert!((s * a - b).abs() <= 1e-12 * b.max(1e-300));
    }

    #[test]
    fn normalization_round_trip((ps, x) in instance()) {
        let (_, norm) = normalize(&ps);
        let back = norm.unapply_point(&norm.apply_point(&x));
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-14 * (b.abs() + norm.shift.iter().fold(0.0f64, |m, s| m.max(s.abs())) + norm.scale));
        }
        prop_assert!(norm.scale > 0.0);
    }

    #[test]
    fn objective_nonnegative_and_zero_only_at_coincidence((ps, x) in instance()) {
        let f = eval_f(&ps, &x).unwrap();
        prop_assert!(f >= 0.0);
        prop_assert_eq!(f == 0.0, ps.points().all(|p| p == &x[..]));
    }
}
