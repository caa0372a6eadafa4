//! The interior-point driver: follow the central path `x_t` from
//! `t_1 = 1/(400 f~)` to `t~* = 2n/(eps~* f~)` in multiplicative steps, one
//! approximate eigenvector and one line search per step.

use rand::Rng;

use crate::centering::CenterOptions;
use crate::error::{GeomedError, Result};
use crate::line_search::{line_search, line_search_lazy, PathContext};
use crate::model::{eval_f, mean_point, normalize, MedianResult, Method, Mode, PointSet, SolverConfig};
use crate::objective::PathState;
use crate::rng::seeded;
use crate::scalar::{from_usize, lit, sq_dist, Scalar};
use crate::spectral::approx_min_eig;

/// The path-parameter schedule `t_i = t_1 (1 + beta)^{i-1}`, `i = 1..=k+1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleParams<T> {
    /// `f(x0)` for the mean `x0`.
    pub f_tilde: T,
    pub t1: T,
    /// `1 + beta`.
    pub growth: T,
    pub t_star: T,
    /// Largest `i` with `t_i <= t_star`.
    pub k: usize,
}

impl<T: Scalar> ScheduleParams<T> {
    /// Builds the schedule from `f~`, the (multiset) size, and the config.
    pub fn new(f_tilde: T, n_eff: T, cfg: &SolverConfig<T>) -> Result<Self> {
        if !(f_tilde > T::zero() && f_tilde.is_finite()) {
            return Err(GeomedError::InvalidParameter(format!(
                "schedule needs a positive finite f~, got {f_tilde}"
            )));
        }
        let eps_star = cfg.eps / lit(3.0);
        let t1 = (lit::<T>(400.0) * f_tilde).recip();
        let t_star = lit::<T>(2.0) * n_eff / (eps_star * f_tilde);
        let steps = (t_star / t1).ln() / cfg.step_factor.ln_1p();
        let k = steps.floor().to_usize().unwrap_or(usize::MAX).saturating_add(1);
        Ok(Self {
            f_tilde,
            t1,
            growth: T::one() + cfg.step_factor,
            t_star,
            k,
        })
    }

    /// `t_i` for 1-based `i`.
    pub fn t(&self, i: usize) -> T {
        let e = from_usize::<T>(i.saturating_sub(1));
        self.t1 * (e * (self.growth - T::one()).ln_1p()).exp()
    }
}

/// Schedule for `ps` as given (no normalization).
pub fn central_path_schedule<T: Scalar>(ps: &PointSet<T>, cfg: &SolverConfig<T>) -> Result<ScheduleParams<T>> {
    let x0 = mean_point(ps);
    ScheduleParams::new(eval_f(ps, &x0)?, ps.total_weight(), cfg)
}

/// One centered iterate, in the caller's coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PathIterate<T> {
    /// 0 for the initial centering at `t_1`, then `i` for `x^(i+1)`.
    pub index: usize,
    /// Path parameter the iterate was centered for (caller's units).
    pub t: T,
    pub x: Vec<T>,
}

/// `(1 + eps)`-approximate geometric median, seeded from `cfg.seed`.
pub fn accurate_median<T: Scalar>(ps: &PointSet<T>, cfg: &SolverConfig<T>) -> Result<MedianResult<T>> {
    accurate_median_with_rng(ps, cfg, &mut seeded(cfg.seed))
}

pub fn accurate_median_with_rng<T: Scalar, R: Rng + ?Sized>(
    ps: &PointSet<T>,
    cfg: &SolverConfig<T>,
    rng: &mut R,
) -> Result<MedianResult<T>> {
    accurate_median_observed(ps, cfg, rng, &mut |_| {})
}

/// As [`accurate_median_with_rng`], reporting every path iterate.
pub fn accurate_median_observed<T: Scalar, R: Rng + ?Sized>(
    ps: &PointSet<T>,
    cfg: &SolverConfig<T>,
    rng: &mut R,
    observer: &mut dyn FnMut(&PathIterate<T>),
) -> Result<MedianResult<T>> {
    cfg.validate()?;
    let done = |x: Vec<T>, outer_iters, inner_evals| -> Result<MedianResult<T>> {
        Ok(MedianResult {
            objective: eval_f(ps, &x)?,
            x,
            method: Method::Accurate,
            outer_iters,
            inner_evals,
            seed: cfg.seed,
        })
    };
    if ps.len() == 1 || ps.all_identical() {
        return done(ps.point(0).to_vec(), 0, 0);
    }

    let (nps, norm) = normalize(ps);
    let n_eff = nps.total_weight();
    let x0 = mean_point(&nps);
    let f_tilde = eval_f(&nps, &x0)?;
    let sched = ScheduleParams::new(f_tilde, n_eff, cfg)?;
    if sched.k > cfg.max_outer_iters {
        return Err(GeomedError::IterationCap {
            cap: cfg.max_outer_iters,
            needed: sched.k,
        });
    }
    let tol = cfg.tolerances(n_eff);
    let ctx = PathContext {
        f_tilde,
        eps_star: tol.eps_star,
        n_eff,
    };
    let policy = CenterOptions::from_config(cfg).power;
    let mut report = |index, t: T, x: &[T]| {
        observer(&PathIterate {
            index,
            t: t / norm.scale,
            x: norm.unapply_point(x),
        })
    };

    let zero = vec![T::zero(); nps.dim()];
    let first = line_search(&nps, &x0, sched.t1, sched.t1, &zero, tol.eps_c, cfg, &ctx, rng)?;
    let mut evals = first.evals;
    let mut x = first.x;
    report(0, sched.t1, &x);
    for i in 1..=sched.k {
        let ti = sched.t(i);
        let tn = sched.t(i + 1);
        let bad_direction = |rng: &mut R| -> Result<Vec<T>> {
            let state = PathState::new(&nps, &x, ti)?;
            Ok(approx_min_eig(&nps, &state, tol.eps_v, cfg.power_constant, policy, rng)?.u)
        };
        let step = line_search_lazy(&nps, &x, ti, tn, bad_direction, tol.eps_c, cfg, &ctx, rng)?;
        evals += step.evals;
        x = step.x;
        report(i, tn, &x);
    }

    let mut out = norm.unapply_point(&x);
    // Never worse than the starting 2-approximation.
    let start = mean_point(ps);
    if eval_f(ps, &start)? < eval_f(ps, &out)? {
        out = start;
    }
    if cfg.polish && cfg.mode == Mode::Practical {
        out = weiszfeld_polish(ps, out, 500)?;
    }
    done(out, sched.k, evals)
}

/// Vardi–Zhang steps from `x`; keeps the best point seen.
fn weiszfeld_polish<T: Scalar>(ps: &PointSet<T>, x: Vec<T>, iters: usize) -> Result<Vec<T>> {
    let d = ps.dim();
    let mut best_val = eval_f(ps, &x)?;
    let mut best = x.clone();
    let mut cur = x;
    for _ in 0..iters {
        let mut num = vec![T::zero(); d];
        let mut den = T::zero();
        let mut pull = vec![T::zero(); d];
        let mut coincident = T::zero();
        for (i, a) in ps.points().enumerate() {
            let w = ps.weight(i);
            let r = sq_dist(&cur, a).sqrt();
            if r.is_zero() {
                coincident += w;
                continue;
            }
            den += w / r;
            for j in 0..d {
                num[j] += w * a[j] / r;
                pull[j] += w * (a[j] - cur[j]) / r;
            }
        }
        if den.is_zero() {
            break;
        }
        let tx: Vec<T> = num.iter().map(|&v| v / den).collect();
        let next = if coincident.is_zero() {
            tx
        } else {
            let r = pull.iter().map(|&p| p * p).sum::<T>().sqrt();
            if r <= coincident {
                break;
            }
            let keep = (coincident / r).min(T::one());
            tx.iter()
                .zip(&cur)
                .map(|(&txj, &cj)| (T::one() - keep) * txj + keep * cj)
                .collect()
        };
        if next == cur {
            break;
        }
        cur = next;
        let v = eval_f(ps, &cur)?;
        if v < best_val {
            best_val = v;
            best = cur.clone();
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_example() {
        let mut cfg = SolverConfig::<f64>::paper_faithful(0.3).unwrap();
        cfg.step_factor = 1.0 / 600.0;
        let s = ScheduleParams::<f64>::new(1.0, 10.0, &cfg).unwrap();
        assert!((s.t1 - 1.0 / 400.0).abs() < 1e-15);
        assert!((s.t_star - 200.0).abs() < 1e-9);
        assert_eq!(s.k, 6780);
        assert!(s.t(s.k) <= s.t_star && s.t(s.k + 1) > s.t_star);
    }

    #[test]
    fn practical_growth_shortens_schedule() {
        let slow = ScheduleParams::new(1.0, 10.0, &SolverConfig::paper_faithful(0.3).unwrap()).unwrap();
        let fast = ScheduleParams::new(1.0, 10.0, &SolverConfig::practical(0.3).unwrap()).unwrap();
        let ratio = slow.k as f64 / fast.k as f64;
        let expected = (1.0f64 / 60.0).ln_1p() / (1.0f64 / 600.0).ln_1p();
        assert!((ratio - expected).abs() < 0.01 * expected, "{ratio} vs {expected}");
    }

    #[test]
    fn zero_f_tilde_rejected() {
        assert!(ScheduleParams::new(0.0, 3.0, &SolverConfig::practical(0.1).unwrap()).is_err());
    }

    #[test]
    fn identical_points_short_circuit() {
        let ps = PointSet::new(vec![2.0, 3.0, 2.0, 3.0], 2).unwrap();
        let r = accurate_median(&ps, &SolverConfig::practical(1e-3).unwrap()).unwrap();
        assert_eq!(r.x, vec![2.0, 3.0]);
        assert_eq!(r.objective, 0.0);
        assert_eq!(r.outer_iters, 0);
    }
}
