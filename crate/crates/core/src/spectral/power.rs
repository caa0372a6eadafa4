use rand::Rng;
use rand_distr::StandardNormal;

use crate::scalar::{dot, lit, norm, Scalar};

/// Result of a power iteration run.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerOutcome<T> {
    /// Unit vector `A^k x / ||A^k x||`, or `e_1` when the operator vanished.
    pub u: Vec<T>,
    /// Set when the iterate collapsed to zero (operator is zero on the start).
    pub degenerate: bool,
    pub iterations: usize,
    /// Rayleigh quotient `x^T A x` of the last normalized input iterate.
    pub rayleigh: T,
}

/// How many times the operator is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerPolicy<T> {
    /// Exactly `k` applications.
    Fixed,
    /// At most `k` applications; stop once the Rayleigh quotient gains less
    /// than `rel_tol` of its value in one step.
    Adaptive { rel_tol: T },
}

fn gaussian_vector<T: Scalar, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<T> {
    (0..d)
        .map(|_| lit(rng.sample::<f64, _>(StandardNormal)))
        .collect()
}

fn basis<T: Scalar>(d: usize) -> Vec<T> {
    let mut e = vec![T::zero(); d];
    e[0] = T::one();
    e
}

/// Power method on a symmetric PSD operator given as `apply(z, out)`.
///
/// Starts from a standard normal vector and applies the operator `k` times,
/// renormalizing after each application (same direction as `A^k x`).
pub fn power_method<T, F, R>(d: usize, apply: F, k: usize, rng: &mut R) -> PowerOutcome<T>
where
    T: Scalar,
    F: FnMut(&[T], &mut [T]),
    R: Rng + ?Sized,
{
    run(d, apply, k.max(1), None, rng)
}

/// Power method with a Rayleigh-quotient stagnation test, capped at `k_max`.
pub fn power_method_adaptive<T, F, R>(
    d: usize,
    apply: F,
    k_max: usize,
    rel_tol: T,
    rng: &mut R,
) -> PowerOutcome<T>
where
    T: Scalar,
    F: FnMut(&[T], &mut [T]),
    R: Rng + ?Sized,
{
    run(d, apply, k_max.max(1), Some(rel_tol), rng)
}

/// `A^k x / ||A^k x||` for a dense symmetric `d x d` matrix `a` (row-major),
/// computed by repeated squaring. Same start vector and direction as
/// [`power_method`] with `k` applications, at `O(d^3 log k)` cost.
pub fn power_method_dense<T, R>(a: &[T], d: usize, k: usize, rng: &mut R) -> PowerOutcome<T>
where
    T: Scalar,
    R: Rng + ?Sized,
{
    let mut x = gaussian_vector::<T, R>(d, rng);
    let start_norm = norm(&x);
    if !(start_norm > T::zero()) {
        x = basis(d);
    }
    let degenerate = || PowerOutcome {
        u: basis(d),
        degenerate: true,
        iterations: k.max(1),
        rayleigh: T::zero(),
    };
    // Rescaling by the max entry keeps powers finite; only directions matter.
    let rescale = |m: &mut Vec<T>| -> bool {
        let top = m.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
        if !(top > T::zero()) || !top.is_finite() {
            return false;
        }
        m.iter_mut().for_each(|v| *v /= top);
        true
    };
    let matmul = |p: &[T], q: &[T]| -> Vec<T> {
        let mut r = vec![T::zero(); d * d];
        for i in 0..d {
            for l in 0..d {
                let pil = p[i * d + l];
                if pil.is_zero() {
                    continue;
                }
                for j in 0..d {
                    r[i * d + j] += pil * q[l * d + j];
                }
            }
        }
        r
    };
    let mut base = a.to_vec();
    if !rescale(&mut base) {
        return degenerate();
    }
    let mut e = k.max(1);
    let mut acc: Option<Vec<T>> = None;
    loop {
        if e & 1 == 1 {
            let mut next = match &acc {
                Some(m) => matmul(m, &base),
                None => base.clone(),
            };
            if !rescale(&mut next) {
                return degenerate();
            }
            acc = Some(next);
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = matmul(&base, &base);
        if !rescale(&mut base) {
            return degenerate();
        }
    }
    let m = acc.expect("k >= 1");
    let mut y: Vec<T> = (0..d).map(|i| dot(&m[i * d..(i + 1) * d], &x)).collect();
    let ny = norm(&y);
    if !(ny > T::zero()) || !ny.is_finite() {
        return degenerate();
    }
    y.iter_mut().for_each(|v| *v /= ny);
    let ay: Vec<T> = (0..d).map(|i| dot(&a[i * d..(i + 1) * d], &y)).collect();
    PowerOutcome {
        rayleigh: dot(&y, &ay),
        u: y,
        degenerate: false,
        iterations: k.max(1),
    }
}

fn run<T, F, R>(
    d: usize,
    mut apply: F,
    k: usize,
    rel_tol: Option<T>,
    rng: &mut R,
) -> PowerOutcome<T>
where
    T: Scalar,
    F: FnMut(&[T], &mut [T]),
    R: Rng + ?Sized,
{
    let mut x = gaussian_vector::<T, R>(d, rng);
    let start_norm = norm(&x);
    if !(start_norm > T::zero()) {
        x = basis(d);
    } else {
        x.iter_mut().for_each(|v| *v /= start_norm);
    }
    let mut y = vec![T::zero(); d];
    let mut rayleigh = T::zero();
    for it in 1..=k {
        apply(&x, &mut y);
        let next = dot(&x, &y);
        let ny = norm(&y);
        if !(ny > T::zero()) || !ny.is_finite() {
            return PowerOutcome {
                u: basis(d),
                degenerate: true,
                iterations: it,
                rayleigh: T::zero(),
            };
        }
        let gain = next - rayleigh;
        rayleigh = next;
        for (xi, &yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
        if let Some(tol) = rel_tol {
            if it >= 3 && gain <= tol * rayleigh {
                return PowerOutcome {
                    u: x,
                    degenerate: false,
                    iterations: it,
                    rayleigh,
                };
            }
        }
    }
    PowerOutcome {
        u: x,
        degenerate: false,
        iterations: k,
        rayleigh,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(entries: &'static [f64]) -> impl FnMut(&[f64], &mut [f64]) {
        move |z, out| {
            for ((o, &zi), &e) in out.iter_mut().zip(z).zip(entries) {
                *o = e * zi;
            }
        }
    }

    #[test]
    fn diagonal_operator_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = power_method(2, diag(&[3.0, 1.0]), 64, &mut rng);
        assert!(!out.degenerate);
        assert!(out.u[0] * out.u[0] >= 1.0 - 1e-9);
        assert!((norm(&out.u) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dense_squaring_matches_iteration() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 1.0];
        let apply = |z: &[f64], out: &mut [f64]| {
            for i in 0..3 {
                out[i] = (0..3).map(|j| a[i * 3 + j] * z[j]).sum();
            }
        };
        for k in [1, 2, 7, 40] {
            let it = power_method(3, apply, k, &mut ChaCha8Rng::seed_from_u64(11));
            let sq = power_method_dense(&a, 3, k, &mut ChaCha8Rng::seed_from_u64(11));
            let diff = it.u.iter().zip(&sq.u).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            assert!(diff < 1e-12, "k = {k}: {diff}");
        }
        assert!(power_method_dense(&[0.0; 4], 2, 5, &mut ChaCha8Rng::seed_from_u64(1)).degenerate);
    }

    #[test]
    fn zero_operator_is_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = power_method(3, diag(&[0.0, 0.0, 0.0]), 10, &mut rng);
        assert!(out.degenerate);
        assert_eq!(out.u, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn adaptive_stops_early_on_wide_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let out = power_method_adaptive(3, diag(&[10.0, 1.0, 0.5]), 500, 1e-12, &mut rng);
        assert!(out.iterations < 40);
        assert!(out.u[0] * out.u[0] >= 1.0 - 1e-10);
    }
}
