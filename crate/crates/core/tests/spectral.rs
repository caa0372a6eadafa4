use geomed::objective::dense_hessian;
use geomed::oracles::{generalized_eigenvalues, projected_gradient_qp, sym_eigenvalues};
use geomed::rng::seeded;
use geomed::spectral::{power_method, rank1_quad, PowerPolicy};
use geomed::{approx_min_eig, ball_rank1_qp, surrogate_solve, PathState, PointSet, RankOneSurrogate};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

fn gauss<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample(StandardNormal)).collect()
}

fn unit<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    let v = gauss(rng, d);
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dense_apply(m: &[f64], d: usize) -> impl Fn(&[f64], &mut [f64]) + '_ {
    move |z, out| {
        for r in 0..d {
            out[r] = (0..d).map(|c| m[r * d + c] * z[c]).sum();
        }
    }
}

/// Top eigenpair from a dense symmetric eigendecomposition.
fn top_eigvec(m: &[f64], d: usize) -> (f64, Vec<f64>) {
    let eig = DMatrix::from_row_slice(d, d, m).symmetric_eigen();
    let i = eig.eigenvalues.imax();
    (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect())
}

#[test]
fn power_method_diagonal() {
    let m = [3.0, 0.0, 0.0, 1.0];
    let out = power_method(2, dense_apply(&m, 2), 64, &mut seeded(1));
    assert!(!out.degenerate);
    assert!(out.u[0] * out.u[0] >= 1.0 - 1e-9);
}

#[test]
fn power_method_zero_operator() {
    let out = power_method(3, |_: &[f64], o: &mut [f64]| o.fill(0.0), 10, &mut seeded(2));
    assert!(out.degenerate);
    assert_eq!(out.u, vec![1.0, 0.0, 0.0]);
}

#[test]
fn power_method_random_psd_with_gap() {
    let d = 8;
    let mut rng = seeded(3);
    let mut good = 0;
    for seed in 0..100u64 {
        // A = V diag(lambda) V^T with relative gap >= 0.2.
        let q = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal)).qr().q();
        let mut lambda = vec![1.0];
        let second: f64 = rng.random_range(0.0..0.8);
        lambda.push(second);
        for _ in 2..d {
            lambda.push(rng.random_range(0.0..=second));
        }
        let a = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambda.clone())) * q.transpose();
        let m: Vec<f64> = (0..d * d).map(|i| a[(i / d, i % d)]).collect();
        let (top, v1) = top_eigvec(&m, d);
        let gap = (top - second) / top;
        assert!(gap >= 0.2 - 1e-12);
        let stable_rank: f64 = lambda.iter().sum::<f64>() / top;
        let k = ((10.0 / gap) * (8.0 * stable_rank / 1e-8).ln()).ceil() as usize;
        let out = power_method(d, dense_apply(&m, d), k, &mut seeded(seed));
        if dot(&out.u, &v1).powi(2) >= 1.0 - 1e-8 {
            good += 1;
        }
    }
    assert!(good >= 99, "{good}/100");
}

#[test]
fn rayleigh_quotient_is_monotone() {
    let mut rng = seeded(4);
    for trial in 0..20u64 {
        let d = 6;
        let b = gauss(&mut rng, d * d);
        let m: Vec<f64> = (0..d * d)
            .map(|i| (0..d).map(|k| b[(i / d) * d + k] * b[(i % d) * d + k]).sum())
            .collect();
        let mut prev = f64::NEG_INFINITY;
        for k in 1..40 {
            let u = power_method(d, dense_apply(&m, d), k, &mut seeded(trial)).u;
            let mut au = vec![0.0; d];
            dense_apply(&m, d)(&u, &mut au);
            let r = dot(&u, &au);
            assert!(r >= prev - 1e-12 * r.abs(), "k={k}: {r} < {prev}");
            prev = r;
        }
    }
}

#[test]
fn single_point_eig_is_exact() {
    let ps = PointSet::new(vec![1.0, 2.0, 3.0], 3).unwrap();
    let st = PathState::new(&ps, &[1.0, 2.0, 3.0], 2.0).unwrap();
    let est = approx_min_eig(&ps, &st, 1e-3, 10.0, PowerPolicy::Fixed, &mut seeded(5)).unwrap();
    assert!(est.degenerate);
    assert_eq!(est.lambda, 2.0);
    let q = est.surrogate();
    assert_eq!((q.scale, q.drop), (2.0, 0.0));
}

#[test]
fn collinear_points_axis_direction() {
    let mut rng = seeded(6);
    for _ in 0..20 {
        let xs: Vec<f64> = gauss(&mut rng, 7);
        let mut coords = Vec::new();
        for x in &xs {
            coords.extend_from_slice(&[*x, 0.0, 0.0]);
        }
        let ps = PointSet::new(coords, 3).unwrap();
        let st = PathState::new(&ps, &[0.05, 0.0, 0.0], 3.0).unwrap();
        let est = approx_min_eig(&ps, &st, 1e-6, 10.0, PowerPolicy::Fixed, &mut rng).unwrap();
        assert!(est.u[0] * est.u[0] >= 1.0 - 1e-6);
    }
}

#[test]
fn surrogate_sandwiches_hessian() {
    let mut rng = seeded(7);
    let mut checked = 0;
    for _ in 0..200 {
        let d = rng.random_range(2..=16);
        let n = rng.random_range(2..40);
        // A tight cluster seen from afar has one flat Hessian direction.
        let ps = PointSet::new(gauss(&mut rng, n * d).iter().map(|v| 0.3 * v).collect(), d).unwrap();
        let x: Vec<f64> = unit(&mut rng, d).iter().map(|v| 5.0 * v).collect();
        let t = 10f64.powf(rng.random_range(0.0..2.0));
        let st = PathState::new(&ps, &x, t).unwrap();
        let h = dense_hessian(&ps, &x, t);
        let mu = sym_eigenvalues(&h, d)[0];
        let eps = (mu / (8.0 * st.t2w())).powi(2).min(0.24);
        if mu > 0.25 * st.t2w() || eps < 1e-300 {
            continue;
        }
        let est = approx_min_eig(&ps, &st, eps, 10.0, PowerPolicy::Fixed, &mut rng).unwrap();
        let q = est.surrogate();
        let qm: Vec<f64> = (0..d * d)
            .map(|i| if i / d == i % d { q.scale } else { 0.0 } - q.drop * q.u[i / d] * q.u[i % d])
            .collect();
        let ge = generalized_eigenvalues(&h, &qm, d).unwrap();
        assert!(ge[0] >= 0.25 && ge[d - 1] <= 4.0, "{ge:?}");
        checked += 1;
    }
    assert!(checked >= 50, "only {checked} instances met the precondition");
}

#[test]
fn surrogate_solve_examples() {
    let q = RankOneSurrogate::new(2.0, 1.0, vec![1.0, 0.0]);
    assert_eq!(surrogate_solve(&q, &[1.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    assert_eq!(surrogate_solve(&q, &[0.0, 1.0]).unwrap(), vec![0.0, 0.5]);
    let singular = RankOneSurrogate::new(2.0, 0.0, vec![1.0, 0.0]);
    assert!(surrogate_solve(&singular, &[1.0, 0.0]).is_err());
}

#[test]
fn surrogate_solve_residual() {
    let mut rng = seeded(8);
    for _ in 0..1000 {
        let d = rng.random_range(1..=32);
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let floor = scale * 10f64.powf(rng.random_range(-3.0..0.0));
        let q = RankOneSurrogate::new(scale, floor, unit(&mut rng, d));
        let b = gauss(&mut rng, d);
        let x = surrogate_solve(&q, &b).unwrap();
        // Q x computed densely, independent of the struct's own apply.
        let qx: Vec<f64> = (0..d)
            .map(|r| (0..d).map(|c| (if r == c { scale } else { 0.0 } - q.drop * q.u[r] * q.u[c]) * x[c]).sum())
            .collect();
        let res = qx.iter().zip(&b).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let bn = dot(&b, &b).sqrt();
        assert!(res <= 1e-10 * bn, "residual {res:e}");
        let back = surrogate_solve(&q, &q.apply(&b)).unwrap();
        let err = back.iter().zip(&b).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        assert!(err <= 1e-10 * bn);
    }
}

#[test]
fn ball_qp_examples() {
    let y = [0.0f64, 0.0];
    let v = [0.0f64, 0.0];
    assert_eq!(ball_rank1_qp(&y, &[0.3, 0.4], &v, 1.0).unwrap(), vec![0.3, 0.4]);
    let x = ball_rank1_qp(&y, &[3.0, 4.0], &v, 1.0).unwrap();
    assert!((x[0] - 0.6).abs() < 1e-14 && (x[1] - 0.8).abs() < 1e-14);
    assert!(ball_rank1_qp(&y, &[3.0, 4.0], &v, -1.0).is_err());
}

#[test]
fn ball_qp_matches_projected_gradient() {
    let mut rng = seeded(9);
    for _ in 0..200 {
        let d = rng.random_range(1..=8);
        let y = gauss(&mut rng, d);
        let z: Vec<f64> = gauss(&mut rng, d).iter().map(|v| 3.0 * v).collect();
        let rho: f64 = rng.random_range(0.0..0.99);
        let v: Vec<f64> = unit(&mut rng, d).iter().map(|u| rho.sqrt() * u).collect();
        let alpha: f64 = rng.random_range(0.0..4.0);
        let x = ball_rank1_qp(&y, &z, &v, alpha).unwrap();
        let off: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
        assert!(off <= alpha + 1e-10);
        let reference = projected_gradient_qp(&y, &z, &v, alpha, 100_000);
        let gap = rank1_quad(&x, &z, &v) - rank1_quad(&reference, &z, &v);
        assert!(gap <= 1e-7, "gap {gap:e}");
    }
}

#[test]
fn unit_vector_outer_product_identity() {
    let mut rng = seeded(10);
    for _ in 0..500 {
        let d = rng.random_range(2..10);
        let (u1, u2) = (unit(&mut rng, d), unit(&mut rng, d));
        let diff: Vec<f64> = (0..d * d).map(|i| u1[i / d] * u1[i % d] - u2[i / d] * u2[i % d]).collect();
        let norm = sym_eigenvalues(&diff, d).iter().fold(0.0f64, |m, e| m.max(e.abs()));
        assert!((norm * norm - (1.0 - dot(&u1, &u2).powi(2))).abs() <= 1e-10);
    }
}

#[test]
fn identity_minus_rank_one_sum_sandwich() {
    let mut rng = seeded(11);
    for _ in 0..300 {
        let d = rng.random_range(2..=16);
        let terms = rng.random_range(1..20);
        let mut m = vec![0.0; d * d];
        let mut b = vec![0.0; d * d];
        let mut alpha_sum = 0.0;
        for _ in 0..terms {
            let a = unit(&mut rng, d);
            let alpha: f64 = rng.random_range(0.1..2.0);
            let beta = alpha * rng.random_range(0.0..0.95);
            alpha_sum += alpha;
            for i in 0..d * d {
                let outer = beta * a[i / d] * a[i % d];
                m[i] -= outer;
                b[i] += outer;
            }
            for i in 0..d {
                m[i * d + i] += alpha;
            }
        }
        let (lambda, v) = top_eigvec(&b, d);
        let approx: Vec<f64> = (0..d * d)
            .map(|i| if i / d == i % d { alpha_sum } else { 0.0 } - lambda * v[i / d] * v[i % d])
            .collect();
        let ge = generalized_eigenvalues(&m, &approx, d).unwrap();
        assert!(ge[0] >= 0.5 - 1e-9 && ge[d - 1] <= 1.0 + 1e-9, "{ge:?}");
    }
}
