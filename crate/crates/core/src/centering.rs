//! LocalCenter: minimize `f_t` over the ball `||x - y|| <= 1/(49 t)` by
//! gradient steps preconditioned with a rank-one surrogate of the Hessian.

use rand::Rng;

use crate::error::{GeomedError, Result};
use crate::model::{Mode, PointSet, SolverConfig};
use crate::objective::{eval_ft, ObjectiveEval};
use crate::scalar::{dot, lit, norm, Scalar};
use crate::spectral::{approx_min_eig, ball_rank1_qp, surrogate_solve, PowerPolicy};

/// Result of one [`local_center`] call.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterOutcome<T> {
    pub x: Vec<T>,
    /// `f_t(x)`.
    pub value: T,
    /// Inner steps taken.
    pub iters: usize,
    pub ball_radius: T,
    pub anchor: Vec<T>,
    /// Evaluations of `f_t` (value + gradient) performed.
    pub evals: usize,
}

/// Knobs for [`local_center`] beyond `(y, t, eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterOptions<T> {
    /// Stop once a Frank–Wolfe certificate proves the target accuracy, or
    /// once the value stalls.
    pub early_exit: bool,
    pub power: PowerPolicy<T>,
    pub power_constant: T,
    /// Start each step from the weight that last succeeded, halved, down to
    /// `1/2` (a full surrogate-Newton step), instead of always from `4`.
    pub adaptive_weight: bool,
}

impl<T: Scalar> CenterOptions<T> {
    /// Literal algorithm: fixed step count, fixed power iterations.
    pub fn exact() -> Self {
        Self {
            early_exit: false,
            power: PowerPolicy::Fixed,
            power_constant: lit(10.0),
            adaptive_weight: false,
        }
    }

    pub fn from_config(cfg: &SolverConfig<T>) -> Self {
        match cfg.mode {
            Mode::PaperFaithful => Self {
                power_constant: cfg.power_constant,
                ..Self::exact()
            },
            Mode::Practical => Self {
                early_exit: true,
                power: PowerPolicy::Adaptive { rel_tol: lit(1e-4) },
                power_constant: cfg.power_constant,
                adaptive_weight: true,
            },
        }
    }
}

/// Inner step count `ceil(64 ln(1/eps))`.
pub fn center_steps<T: Scalar>(eps: T) -> usize {
    (lit::<T>(64.0) * eps.recip().ln())
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
        .max(1)
}

const MAX_BACKTRACK: usize = 40;

/// Approximately minimizes `f_t` over the ball of radius `1/(49 t)` around `y`.
///
/// `Q` is built once at `y`; each step minimizes
/// `<grad f_t(x), x' - x> + 4 ||x' - x||_Q^2` over the ball exactly. If a step
/// fails to decrease `f_t` (the surrogate is a poor fit) the quadratic weight
/// is doubled and the step retried, so the iterates always descend.
pub fn local_center<T: Scalar, R: Rng + ?Sized>(
    ps: &PointSet<T>,
    y: &[T],
    t: T,
    eps: T,
    opts: &CenterOptions<T>,
    rng: &mut R,
) -> Result<CenterOutcome<T>> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(GeomedError::InvalidParameter(format!(
            "centering tolerance must lie in (0, 1), got {eps}"
        )));
    }
    let anchor = eval_ft(ps, y, t)?;
    let eig_eps = eps.min(lit(0.24));
    let est = approx_min_eig(ps, &anchor.state, eig_eps, opts.power_constant, opts.power, rng)?;
    let q = est.surrogate();
    let rho = q.rho().min(T::one() - T::epsilon() * lit(4.0));
    let sr = rho.max(T::zero()).sqrt();
    let v: Vec<T> = q.u.iter().map(|&ui| sr * ui).collect();

    let radius = (lit::<T>(49.0) * t).recip();
    let alpha = radius * radius;
    let k = center_steps(eps);
    let f_anchor = anchor.value;
    let floor = T::tolerance_floor();
    let resolution = lit::<T>(4.0) * T::epsilon();

    let mut evals = 1;
    let mut cur: ObjectiveEval<T> = anchor;
    let mut iters = 0;
    let mut stall = 0;
    let base = lit::<T>(4.0);
    let mut last_weight = base;
    while iters < k {
        if opts.early_exit && certified(&cur, y, radius, eps, f_anchor, floor) {
            break;
        }
        let dir = surrogate_solve(&q, &cur.grad)?;
        let mut weight = if opts.adaptive_weight {
            (last_weight * lit(0.5)).max(lit(0.5))
        } else {
            base
        };
        let mut next = None;
        for _ in 0..MAX_BACKTRACK {
            let step = (lit::<T>(2.0) * weight).recip();
            let z: Vec<T> = cur.state.x.iter().zip(&dir).map(|(&xi, &di)| xi - step * di).collect();
            let cand = ball_rank1_qp(y, &z, &v, alpha)?;
            if cand == cur.state.x {
                break;
            }
            let ev = eval_ft(ps, &cand, t)?;
            evals += 1;
            if ev.value < cur.value {
                last_weight = weight;
                next = Some(ev);
                break;
            }
            // Once f_t is flat to rounding, progress shows only in the gradient;
            // follow it until the gap itself is at rounding level. Shorter
            // steps would be just as flat, so stop backtracking either way.
            if ev.value <= cur.value + resolution * cur.value.abs() {
                if norm(&ev.grad) < norm(&cur.grad) && !certified(&cur, y, radius, T::zero(), f_anchor, floor) {
                    next = Some(ev);
                }
                break;
            }
            weight *= lit(2.0);
        }
        iters += 1;
        let Some(ev) = next else {
            // No descent possible at working precision: a fixed point.
            break;
        };
        let drop = cur.value - ev.value;
        cur = ev;
        if opts.early_exit {
            if drop <= lit::<T>(1e-15) * cur.value.abs() {
                stall += 1;
                if stall >= 2 {
                    break;
                }
            } else {
                stall = 0;
            }
        }
    }
    Ok(CenterOutcome {
        value: cur.value,
        x: cur.state.x,
        iters,
        ball_radius: radius,
        anchor: y.to_vec(),
        evals,
    })
}

/// Frank–Wolfe gap `max_{z in ball} <grad, x - z>` bounds `f_t(x) - min`; stop
/// once it is within `eps` of the progress made, or below what `f_t` resolves.
fn certified<T: Scalar>(
    cur: &ObjectiveEval<T>,
    y: &[T],
    radius: T,
    eps: T,
    f_anchor: T,
    floor: T,
) -> bool {
    let offset: Vec<T> = cur.state.x.iter().zip(y).map(|(&a, &b)| a - b).collect();
    let gap = dot(&cur.grad, &offset) + radius * norm(&cur.grad);
    let progress = (f_anchor - cur.value).max(T::zero());
    gap <= eps * progress || gap <= floor * cur.value.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn single_point_stays_put() {
        let ps = PointSet::new(vec![0.5, -2.0, 1.0], 3).unwrap();
        let out = local_center(&ps, &[0.5, -2.0, 1.0], 3.0, 1e-6, &CenterOptions::exact(), &mut seeded(1)).unwrap();
        assert_eq!(out.x, vec![0.5, -2.0, 1.0]);
        assert!((out.value - (1.0 - 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn symmetric_center_is_fixed() {
        let ps = PointSet::new(vec![1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, -1.0], 2).unwrap();
        for opts in [CenterOptions::exact(), CenterOptions::from_config(&SolverConfig::practical(1e-3).unwrap())] {
            let out = local_center(&ps, &[0.0, 0.0], 2.0, 1e-4, &opts, &mut seeded(2)).unwrap();
            assert!(norm(&out.x) <= 1e-12);
        }
    }

    #[test]
    fn iterates_stay_in_ball_and_descend() {
        let ps = PointSet::new(vec![0.0, 0.0, 3.0, 0.0, 0.0, 4.0, -1.0, 2.0, 2.0, 2.0], 2).unwrap();
        let y = [1.5, 1.5];
        let t = 0.8;
        let out = local_center(&ps, &y, t, 1e-8, &CenterOptions::exact(), &mut seeded(3)).unwrap();
        let dist = norm(&[out.x[0] - y[0], out.x[1] - y[1]]);
        assert!(dist <= out.ball_radius + 1e-12);
        assert!(out.value <= eval_ft(&ps, &y, t).unwrap().value);
        assert_eq!(center_steps(1e-8), (64.0 * 1e8f64.ln()).ceil() as usize);
    }
}
