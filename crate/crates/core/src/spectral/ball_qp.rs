use crate::error::{GeomedError, Result};
use crate::scalar::{dot, Scalar};


/// `||x - z||^2_{I - v v^T}`.
pub fn rank1_quad<T: Scalar>(x: &[T], z: &[T], v: &[T]) -> T {
    let diff: Vec<T> = x.iter().zip(z).map(|(&a, &b)| a - b).collect();
    let c = dot(v, &diff);
    dot(&diff, &diff) - c * c
}

/// `(eta I - v v^T)^{-1} b = (b + v <v, b> / (eta - |v|^2)) / eta`.
fn shifted_solve<T: Scalar>(eta: T, v: &[T], rho: T, b: &[T]) -> Vec<T> {
    let c = dot(v, b) / (eta - rho);
    b.iter().zip(v).map(|(&bi, &vi)| (bi + c * vi) / eta).collect()
}

/// Exact minimizer of `||x - z||^2_{I - v v^T}` over the ball `||x - y||^2 <= alpha`.
///
/// If `z` is feasible it is the answer. Otherwise, with `Q = I - v v^T` and
/// `eta = 1 + lambda` for the multiplier `lambda > 0` of the active
/// constraint, the minimizer is `x = y + (eta I - v v^T)^{-1} Q (z - y)`, and
/// `eta` is the unique root above 1 of the secular equation
/// `p^2/(eta - |v|^2)^2 + q^2/eta^2 = alpha` (`p`, `q` the components of
/// `Q (z - y)` along and across `v`). Clearing denominators gives the quartic
/// `alpha eta^2 (eta - |v|^2)^2 = c1 (eta - |v|^2)^2 + c2 (2 eta - |v|^2)`;
/// its root is found by Newton on `1/sqrt(lhs) - 1/sqrt(alpha)`, which is
/// concave and increasing in `eta`, so the iteration climbs monotonically.
pub fn ball_rank1_qp<T: Scalar>(y: &[T], z: &[T], v: &[T], alpha: T) -> Result<Vec<T>> {
    if !(alpha >= T::zero()) {
        return Err(GeomedError::InvalidParameter(format!(
            "ball radius squared must be non-negative, got {alpha}"
        )));
    }
    if y.len() != z.len() || y.len() != v.len() {
        return Err(GeomedError::DimensionMismatch {
            expected: y.len(),
            got: if z.len() != y.len() { z.len() } else { v.len() },
        });
    }
    let rho = dot(v, v);
    if !(rho < T::one()) {
        return Err(GeomedError::InvalidParameter(
            "rank-one term must satisfy |v| < 1".into(),
        ));
    }
    let r: Vec<T> = z.iter().zip(y).map(|(&a, &b)| a - b).collect();
    let rr = dot(&r, &r);
    if rr <= alpha {
        return Ok(z.to_vec());
    }
    if alpha.is_zero() {
        return Ok(y.to_vec());
    }
    let vr = dot(v, &r);
    let qr: Vec<T> = r.iter().zip(v).map(|(&ri, &vi)| ri - vr * vi).collect();
    let eta = secular_root(&qr, v, rho, alpha);
    let step = shifted_solve(eta, v, rho, &qr);
    let mut x: Vec<T> = y.iter().zip(&step).map(|(&yi, &si)| yi + si).collect();
    // Pull rounding excess back onto the sphere.
    let dist2 = x.iter().zip(y).fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
    if dist2 > alpha {
        let shrink = (alpha / dist2).sqrt();
        for (xi, &yi) in x.iter_mut().zip(y) {
            *xi = yi + (*xi - yi) * shrink;
        }
    }
    Ok(x)
}

/// Root `eta > 1` of `|(eta I - v v^T)^{-1} b|^2 = alpha`, given that the
/// left side exceeds `alpha` at `eta = 1`.
fn secular_root<T: Scalar>(b: &[T], v: &[T], rho: T, alpha: T) -> T {
    let bb = dot(b, b);
    let p2 = if rho > T::zero() {
        let vb = dot(v, b);
        vb * vb / rho
    } else {
        T::zero()
    };
    let q2 = (bb - p2).max(T::zero());
    let gap = |eta: T| eta - rho;
    let size2 = |eta: T| p2 / (gap(eta) * gap(eta)) + q2 / (eta * eta);
    let target = alpha.sqrt().recip();
    let mut eta = T::one();
    let mut hi = T::infinity();
    for _ in 0..100 {
        let s2 = size2(eta);
        let s = s2.sqrt();
        let psi = s.recip() - target;
        if psi >= T::zero() {
            // At or past the root: the iteration only overshoots by rounding.
            hi = hi.min(eta);
            break;
        }
        let slope = (p2 / gap(eta).powi(3) + q2 / eta.powi(3)) / (s2 * s);
        let next = eta - psi / slope;
        if !(next.is_finite() && next > eta) {
            break;
        }
        if next - eta <= T::epsilon() * next {
            eta = next;
            break;
        }
        eta = next;
    }
    if hi.is_finite() && size2(eta) < alpha {
        return hi;
    }
    eta
}
