//! The penalized objective
//! `f_t(x) = sum_i w_i [g_i(x) - ln(1 + g_i(x))]`, `g_i(x) = sqrt(1 + t^2 ||x - a(i)||^2)`,
//! its gradient, and matrix-free products with its Hessian and with the
//! rank-deficient part `A` of the Hessian. Every kernel is a single fixed-order
//! pass over the points, `O(nd)`.

use crate::error::{GeomedError, Result};
use crate::model::PointSet;
use crate::scalar::{dot, sq_dist, Scalar};

/// Per-point statistics of the penalized objective at `(x, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathState<T> {
    pub x: Vec<T>,
    pub t: T,
    /// `g_t(i)(x)`, each at least one.
    pub g: Vec<T>,
    /// `w_t(x) = sum_i w_i / (1 + g_i)`.
    pub w: T,
    /// Weighted harmonic-type mean `w / sum_i w_i / ((1 + g_i) g_i)`.
    pub gbar: T,
}

impl<T: Scalar> PathState<T> {
    pub fn new(ps: &PointSet<T>, x: &[T], t: T) -> Result<Self> {
        check_t(t)?;
        ps.check_dim(x)?;
        let g = compute_g(ps, x, t);
        Ok(Self::from_g(ps, x.to_vec(), t, g))
    }

    fn from_g(ps: &PointSet<T>, x: Vec<T>, t: T, g: Vec<T>) -> Self {
        let mut w = T::zero();
        let mut inv = T::zero();
        for (i, &gi) in g.iter().enumerate() {
            let m = ps.weight(i);
            w += m / (T::one() + gi);
            inv += m / ((T::one() + gi) * gi);
        }
        Self {
            x,
            t,
            g,
            w,
            gbar: w / inv,
        }
    }

    /// `t^2 w_t(x)`, the largest possible Hessian eigenvalue.
    pub fn t2w(&self) -> T {
        self.t * self.t * self.w
    }

    /// Spectral bounds `sum w_i t^2/((1+g_i) g_i) <= H <= t^2 w_t(x)`.
    pub fn hessian_bounds(&self, ps: &PointSet<T>) -> (T, T) {
        let t2 = self.t * self.t;
        let lower = self
            .g
            .iter()
            .enumerate()
            .map(|(i, &gi)| ps.weight(i) * t2 / ((T::one() + gi) * gi))
            .sum();
        (lower, self.t2w())
    }
}

/// Value, gradient, and cached statistics of `f_t` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveEval<T> {
    pub value: T,
    pub grad: Vec<T>,
    pub state: PathState<T>,
}

fn check_t<T: Scalar>(t: T) -> Result<()> {
    if !(t > T::zero() && t.is_finite()) {
        return Err(GeomedError::InvalidParameter(format!(
            "path parameter must be positive and finite, got {t}"
        )));
    }
    Ok(())
}

#[inline]
fn g_of<T: Scalar>(t: T, sq: T) -> T {
    (T::one() + t * t * sq).sqrt()
}

fn compute_g<T: Scalar>(ps: &PointSet<T>, x: &[T], t: T) -> Vec<T> {
    ps.points().map(|a| g_of(t, sq_dist(x, a))).collect()
}

pub fn eval_ft<T: Scalar>(ps: &PointSet<T>, x: &[T], t: T) -> Result<ObjectiveEval<T>> {
    check_t(t)?;
    ps.check_dim(x)?;
    let t2 = t * t;
    let mut value = T::zero();
    let mut grad = vec![T::zero(); x.len()];
    let mut g = Vec::with_capacity(ps.len());
    for (i, a) in ps.points().enumerate() {
        let gi = g_of(t, sq_dist(x, a));
        let m = ps.weight(i);
        value += m * (gi - gi.ln_1p());
        let coef = m * t2 / (T::one() + gi);
        for ((gj, &xj), &aj) in grad.iter_mut().zip(x).zip(a) {
            *gj += coef * (xj - aj);
        }
        g.push(gi);
    }
    if !value.is_finite() || grad.iter().any(|v| !v.is_finite()) {
        return Err(GeomedError::NonFinite("penalized objective"));
    }
    let state = PathState::from_g(ps, x.to_vec(), t, g);
    Ok(ObjectiveEval { value, grad, state })
}

/// Value of `f_t` only.
pub fn value_ft<T: Scalar>(ps: &PointSet<T>, x: &[T], t: T) -> T {
    ps.points()
        .enumerate()
        .map(|(i, a)| {
            let gi = g_of(t, sq_dist(x, a));
            ps.weight(i) * (gi - gi.ln_1p())
        })
        .sum()
}

fn check_vec<T: Scalar>(ps: &PointSet<T>, z: &[T]) -> Result<()> {
    ps.check_dim(z)
}

/// `out = A z` with `A = sum_i w_i t^4 (x - a)(x - a)^T / ((1 + g_i)^2 g_i)`.
pub fn amat_apply<T: Scalar>(ps: &PointSet<T>, state: &PathState<T>, z: &[T], out: &mut [T]) {
    let t4 = state.t.powi(4);
    out.iter_mut().for_each(|o| *o = T::zero());
    for (i, a) in ps.points().enumerate() {
        let gi = state.g[i];
        let c = state
            .x
            .iter()
            .zip(a)
            .zip(z)
            .fold(T::zero(), |acc, ((&xj, &aj), &zj)| acc + (xj - aj) * zj);
        if c.is_zero() {
            continue;
        }
        let onep = T::one() + gi;
        let coef = ps.weight(i) * t4 * c / (onep * onep * gi);
        for ((o, &xj), &aj) in out.iter_mut().zip(&state.x).zip(a) {
            *o += coef * (xj - aj);
        }
    }
}

/// `A` as a dense row-major `d x d` matrix.
pub fn amat_dense<T: Scalar>(ps: &PointSet<T>, state: &PathState<T>) -> Vec<T> {
    let d = ps.dim();
    let t4 = state.t.powi(4);
    let mut m = vec![T::zero(); d * d];
    for (i, a) in ps.points().enumerate() {
        let gi = state.g[i];
        let onep = T::one() + gi;
        let coef = ps.weight(i) * t4 / (onep * onep * gi);
        let diff: Vec<T> = state.x.iter().zip(a).map(|(&xj, &aj)| xj - aj).collect();
        for j in 0..d {
            let cj = coef * diff[j];
            for l in 0..d {
                m[j * d + l] += cj * diff[l];
            }
        }
    }
    m
}

pub fn amat_matvec<T: Scalar>(ps: &PointSet<T>, state: &PathState<T>, z: &[T]) -> Result<Vec<T>> {
    check_vec(ps, z)?;
    let mut out = vec![T::zero(); z.len()];
    amat_apply(ps, state, z, &mut out);
    Ok(out)
}

/// `out = H z`, each point contributing
/// `t^2/(1+g) [z - t^2 <x - a, z> (x - a) / (g (1 + g))]`.
pub fn hess_apply<T: Scalar>(ps: &PointSet<T>, state: &PathState<T>, z: &[T], out: &mut [T]) {
    let t2 = state.t * state.t;
    out.iter_mut().for_each(|o| *o = T::zero());
    for (i, a) in ps.points().enumerate() {
        let gi = state.g[i];
        let coef = ps.weight(i) * t2 / (T::one() + gi);
        let c = state
            .x
            .iter()
            .zip(a)
            .zip(z)
            .fold(T::zero(), |acc, ((&xj, &aj), &zj)| acc + (xj - aj) * zj);
        let shrink = t2 * c / (gi * (T::one() + gi));
        for (((o, &zj), &xj), &aj) in out.iter_mut().zip(z).zip(&state.x).zip(a) {
            *o += coef * (zj - shrink * (xj - aj));
        }
    }
}

pub fn hess_matvec<T: Scalar>(ps: &PointSet<T>, state: &PathState<T>, z: &[T]) -> Result<Vec<T>> {
    check_vec(ps, z)?;
    let mut out = vec![T::zero(); z.len()];
    hess_apply(ps, state, z, &mut out);
    Ok(out)
}

/// `z^T H z` evaluated as `sum_i t^2/(1+g_i) (|z_perp|^2 + |z_par|^2 / g_i)`,
/// which stays accurate when the minimum eigenvalue is far below `t^2 w`.
pub fn hess_quadratic<T: Scalar>(ps: &PointSet<T>, state: &PathState<T>, z: &[T]) -> T {
    let t2 = state.t * state.t;
    let zz = dot(z, z);
    let mut total = T::zero();
    for (i, a) in ps.points().enumerate() {
        let gi = state.g[i];
        let coef = ps.weight(i) * t2 / (T::one() + gi);
        let r2 = sq_dist(&state.x, a);
        if r2.is_zero() {
            total += coef * zz;
            continue;
        }
        let c = state
            .x
            .iter()
            .zip(a)
            .zip(z)
            .fold(T::zero(), |acc, ((&xj, &aj), &zj)| acc + (xj - aj) * zj);
        let par2 = c * c / r2;
        let s = c / r2;
        let perp2 = z
            .iter()
            .zip(&state.x)
            .zip(a)
            .fold(T::zero(), |acc, ((&zj, &xj), &aj)| {
                let v = zj - s * (xj - aj);
                acc + v * v
            });
        total += coef * (perp2 + par2 / gi);
    }
    total
}

/// Minimizer over `alpha_i` of `t alpha_i - ln(alpha_i^2 - ||x - a(i)||^2)`,
/// i.e. `(1 + g_i) / t`.
pub fn optimal_alpha<T: Scalar>(state: &PathState<T>, i: usize) -> T {
    (T::one() + state.g[i]) / state.t
}

/// Dense Hessian (row-major, `d x d`); test and oracle use only.
pub fn dense_hessian<T: Scalar>(ps: &PointSet<T>, x: &[T], t: T) -> Vec<T> {
    let d = ps.dim();
    let t2 = t * t;
    let mut h = vec![T::zero(); d * d];
    let mut diff = vec![T::zero(); d];
    for (i, a) in ps.points().enumerate() {
        for ((dj, &xj), &aj) in diff.iter_mut().zip(x).zip(a) {
            *dj = xj - aj;
        }
        let gi = g_of(t, dot(&diff, &diff));
        let m = ps.weight(i);
        let coef = m * t2 / (T::one() + gi);
        let rank = m * t2 * t2 / ((T::one() + gi) * (T::one() + gi) * gi);
        for r in 0..d {
            h[r * d + r] += coef;
            for c in 0..d {
                h[r * d + c] -= rank * diff[r] * diff[c];
            }
        }
    }
    h
}

/// Lipschitz bound `t * W` on `f_t`, i.e. on `||grad f_t||`.
pub fn gradient_bound<T: Scalar>(ps: &PointSet<T>, t: T) -> T {
    t * ps.total_weight()
}
