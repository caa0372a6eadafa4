//! Spectral machinery: power iteration on `A`, the approximate bad direction
//! of the Hessian, the rank-one surrogate `Q`, and the `O(d)` ball-constrained
//! quadratic solve in the `I - v v^T` norm.

mod ball_qp;
mod power;
mod quartic;
mod surrogate;

pub use ball_qp::{ball_rank1_qp, rank1_quad};
pub use power::{power_method, power_method_adaptive, power_method_dense, PowerOutcome, PowerPolicy};
pub use quartic::{quartic_real_roots, quartic_roots};
pub use surrogate::{surrogate_solve, RankOneSurrogate};

use rand::Rng;

use crate::error::{GeomedError, Result};
use crate::model::PointSet;
use crate::objective::{amat_apply, amat_dense, hess_quadratic, PathState};
use crate::scalar::{lit, Scalar};

/// Approximate minimum eigenpair of the Hessian of `f_t` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct EigEstimate<T> {
    /// Unit vector, approximate top eigenvector of `A` (bad direction).
    pub u: Vec<T>,
    /// `u^T H u`, clamped to the Hessian's spectral bounds.
    pub lambda: T,
    /// `t^2 w_t(x)`.
    pub t2w: T,
    pub degenerate: bool,
    pub iterations: usize,
}

impl<T: Scalar> EigEstimate<T> {
    /// `Q = t^2 w I - (t^2 w - lambda) u u^T`.
    pub fn surrogate(&self) -> RankOneSurrogate<T> {
        RankOneSurrogate::new(self.t2w, self.lambda, self.u.clone())
    }
}

/// Number of power iterations `ceil(c ln(3 max(n, 2) / eps))`.
pub fn power_iterations<T: Scalar>(constant: T, n_eff: T, eps: T) -> usize {
    let n = n_eff.max(lit(2.0));
    let k = (constant * (lit::<T>(3.0) * n / eps).ln()).ceil();
    k.to_usize().unwrap_or(usize::MAX).max(1)
}

/// Power method on `A` followed by the Rayleigh value against the Hessian.
pub fn approx_min_eig<T: Scalar, R: Rng + ?Sized>(
    ps: &PointSet<T>,
    state: &PathState<T>,
    eps: T,
    constant: T,
    policy: PowerPolicy<T>,
    rng: &mut R,
) -> Result<EigEstimate<T>> {
    if !(eps > T::zero() && eps < lit(0.25)) {
        return Err(GeomedError::InvalidParameter(format!(
            "eigenvector tolerance must lie in (0, 1/4), got {eps}"
        )));
    }
    let k = power_iterations(constant, ps.total_weight(), eps);
    let apply = |z: &[T], out: &mut [T]| amat_apply(ps, state, z, out);
    let (n, d) = (ps.len(), ps.dim());
    let out = match policy {
        // For small d, k sparse applications cost more than squaring the
        // dense matrix; both produce the same iterate.
        PowerPolicy::Fixed if d * d * (usize::BITS - k.leading_zeros()) as usize <= n * k => {
            power_method_dense(&amat_dense(ps, state), d, k, rng)
        }
        PowerPolicy::Fixed => power_method(d, apply, k, rng),
        PowerPolicy::Adaptive { rel_tol } => power_method_adaptive(ps.dim(), apply, k, rel_tol, rng),
    };
    let (lower, upper) = state.hessian_bounds(ps);
    let lambda = if out.degenerate {
        upper
    } else {
        hess_quadratic(ps, state, &out.u).max(lower).min(upper)
    };
    Ok(EigEstimate {
        u: out.u,
        lambda,
        t2w: upper,
        degenerate: out.degenerate,
        iterations: out.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_point_surrogate_is_exact() {
        let ps = PointSet::new(vec![2.0, -1.0], 2).unwrap();
        let st = PathState::new(&ps, &[2.0, -1.0], 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let est = approx_min_eig(&ps, &st, 1e-3, 10.0, PowerPolicy::Fixed, &mut rng).unwrap();
        assert!(est.degenerate);
        assert_eq!(est.lambda, 4.5);
        let q = est.surrogate();
        assert_eq!(q.drop, 0.0);
        assert_eq!(q.scale, 4.5);
    }

    #[test]
    fn collinear_points_give_axis_direction() {
        let ps = PointSet::new(vec![-2.0, 0.0, -0.5, 0.0, 1.0, 0.0, 3.0, 0.0], 2).unwrap();
        let st = PathState::new(&ps, &[0.1, 0.0], 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let est = approx_min_eig(&ps, &st, 1e-6, 10.0, PowerPolicy::Fixed, &mut rng).unwrap();
        assert!(est.u[0] * est.u[0] >= 1.0 - 1e-6);
        assert!(est.lambda <= est.t2w);
    }

    #[test]
    fn iteration_count_formula() {
        // ceil(10 ln(3*8/1e-8))
        let k = power_iterations(10.0f64, 8.0, 1e-8);
        assert_eq!(k, (10.0 * (24.0f64 / 1e-8).ln()).ceil() as usize);
        assert_eq!(power_iterations(10.0f64, 1.0, 0.5), (10.0 * 12.0f64.ln()).ceil() as usize);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let ps = PointSet::new(vec![0.0, 1.0], 1).unwrap();
        let st = PathState::new(&ps, &[0.5], 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(approx_min_eig(&ps, &st, 0.3, 10.0, PowerPolicy::Fixed, &mut rng).is_err());
    }
}
