//! Trisection over a noisy convex oracle, and the line search along the bad
//! direction that uses [`local_center`] as that oracle.

use std::collections::HashMap;

use rand::Rng;

use crate::centering::{local_center, CenterOptions, CenterOutcome};
use crate::error::{GeomedError, Result};
use crate::model::{Mode, PointSet, SolverConfig};
use crate::objective::value_ft;
use crate::scalar::{lit, sq_dist, Scalar};

/// Search interval `[lo, hi]`, Lipschitz bound, and target additive error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchInterval<T> {
    pub lo: T,
    pub hi: T,
    pub lipschitz: T,
    pub tol: T,
}

impl<T: Scalar> SearchInterval<T> {
    pub fn new(lo: T, hi: T, lipschitz: T, tol: T) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(GeomedError::InvalidParameter(format!(
                "search interval [{lo}, {hi}] is not a finite interval"
            )));
        }
        if !(lipschitz > T::zero() && tol > T::zero()) {
            return Err(GeomedError::InvalidParameter(
                "Lipschitz bound and tolerance must be positive".into(),
            ));
        }
        Ok(Self { lo, hi, lipschitz, tol })
    }

    /// `max(0, ceil(log_{3/2}(L (hi - lo) / tol)))`.
    pub fn budget(&self) -> usize {
        let ratio = self.lipschitz * (self.hi - self.lo) / self.tol;
        if !(ratio > T::one()) {
            return 0;
        }
        (ratio.ln() / lit::<T>(1.5).ln())
            .ceil()
            .to_usize()
            .unwrap_or(usize::MAX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneDimOutcome<T> {
    pub x: T,
    /// Oracle value at `x`.
    pub value: T,
    pub queries: usize,
}

/// Trisection keeping the best queried point. Makes exactly
/// `2 * budget + 1` oracle calls (the left end is queried first).
pub fn one_dim_minimizer<T, F>(iv: &SearchInterval<T>, mut g: F) -> Result<OneDimOutcome<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let mut queries = 0;
    let mut query = |a: T| -> Result<T> {
        queries += 1;
        let v = g(a)?;
        if !v.is_finite() {
            return Err(GeomedError::NonFinite("line search oracle"));
        }
        Ok(v)
    };
    let three = lit::<T>(3.0);
    let two = lit::<T>(2.0);
    let mut best = iv.lo;
    let mut best_val = query(iv.lo)?;
    let (mut lo, mut hi) = (iv.lo, iv.hi);
    for _ in 0..iv.budget() {
        let zl = (two * lo + hi) / three;
        let zu = (lo + two * hi) / three;
        let gl = query(zl)?;
        let gu = query(zu)?;
        if gl <= gu {
            hi = zu;
            if gl <= best_val {
                best = zl;
                best_val = gl;
            }
        } else {
            lo = zl;
            if gu <= best_val {
                best = zu;
                best_val = gu;
            }
        }
    }
    Ok(OneDimOutcome {
        x: best,
        value: best_val,
        queries,
    })
}

/// Problem-level quantities the line search needs from the driver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathContext<T> {
    /// `f(x0)`, the 2-approximation of the optimum.
    pub f_tilde: T,
    pub eps_star: T,
    /// Multiset size used in tolerance formulas.
    pub n_eff: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchOutcome<T> {
    pub x: Vec<T>,
    /// `f_{t_next}(x)`.
    pub value: T,
    pub alpha: T,
    pub queries: usize,
    /// Distinct [`local_center`] runs (repeated probes are cached).
    pub center_calls: usize,
    pub evals: usize,
}

/// Minimizes `alpha -> f_{t'}(LocalCenter(y + alpha dir, t'))` over a
/// bounded interval and returns the centered point at the best `alpha`.
///
/// `dir` is a unit vector or zero.
#[allow(clippy::too_many_arguments)]
pub fn line_search<T: Scalar, R: Rng + ?Sized>(
    ps: &PointSet<T>,
    y: &[T],
    t: T,
    t_next: T,
    dir: &[T],
    eps: T,
    cfg: &SolverConfig<T>,
    ctx: &PathContext<T>,
    rng: &mut R,
) -> Result<LineSearchOutcome<T>> {
    ps.check_dim(dir)?;
    line_search_lazy(ps, y, t, t_next, |_: &mut R| Ok(dir.to_vec()), eps, cfg, ctx, rng)
}

/// [`line_search`] with the direction computed on demand: in practical mode
/// it is never needed when centering at `y` already lands inside the ball.
#[allow(clippy::too_many_arguments)]
pub(crate) fn line_search_lazy<T: Scalar, R: Rng + ?Sized, D>(
    ps: &PointSet<T>,
    y: &[T],
    t: T,
    t_next: T,
    dir: D,
    eps: T,
    cfg: &SolverConfig<T>,
    ctx: &PathContext<T>,
    rng: &mut R,
) -> Result<LineSearchOutcome<T>>
where
    D: FnOnce(&mut R) -> Result<Vec<T>>,
{
    if !(t > T::zero() && t_next >= t) {
        return Err(GeomedError::InvalidParameter(format!(
            "line search needs 0 < t <= t_next, got t = {t}, t_next = {t_next}"
        )));
    }
    ps.check_dim(y)?;
    let opts = CenterOptions::from_config(cfg);
    let center_eps = cfg.line_search_tolerance(eps, ctx.eps_star, ctx.n_eff, T::one());
    let scale = value_ft(ps, y, t_next);
    let search_tol = cfg.line_search_tolerance(eps, ctx.eps_star, ctx.n_eff, scale);

    let mut reach = lit::<T>(6.0) * ctx.f_tilde;
    if cfg.mode == Mode::Practical {
        // The central path stays in the convex hull of the points.
        let far = ps
            .points()
            .map(|a| sq_dist(a, y))
            .fold(T::zero(), T::max)
            .sqrt();
        reach = reach.min(far + (lit::<T>(49.0) * t_next).recip());
    }
    let iv = SearchInterval::new(-reach, reach, t_next * ctx.n_eff, search_tol)?;

    let mut cache: HashMap<Vec<u64>, CenterOutcome<T>> = HashMap::new();
    let mut evals = 0;
    if cfg.mode == Mode::Practical {
        // A centered point strictly inside its ball is the unconstrained
        // minimizer of f_{t'}, hence also minimizes the searched function.
        let out = local_center(ps, y, t_next, center_eps, &opts, rng)?;
        evals += out.evals;
        if sq_dist(&out.x, y).sqrt() <= lit::<T>(0.999) * out.ball_radius {
            return Ok(LineSearchOutcome {
                value: out.value,
                x: out.x,
                alpha: T::zero(),
                queries: 1,
                center_calls: 1,
                evals,
            });
        }
        let key: Vec<u64> = y.iter().map(|v| v.to_f64().unwrap_or(f64::NAN).to_bits()).collect();
        cache.insert(key, out);
    }
    let dir = dir(rng)?;
    ps.check_dim(&dir)?;
    let mut probe = |alpha: T, rng: &mut R| -> Result<(T, Vec<u64>)> {
        let p: Vec<T> = y.iter().zip(&dir).map(|(&yi, &di)| yi + alpha * di).collect();
        let key: Vec<u64> = p.iter().map(|v| v.to_f64().unwrap_or(f64::NAN).to_bits()).collect();
        if let Some(hit) = cache.get(&key) {
            return Ok((hit.value, key));
        }
        let out = local_center(ps, &p, t_next, center_eps, &opts, rng)?;
        evals += out.evals;
        let v = out.value;
        cache.insert(key.clone(), out);
        Ok((v, key))
    };
    let best = one_dim_minimizer(&iv, |a| probe(a, rng).map(|(v, _)| v))?;
    let (_, key) = probe(best.x, rng)?;
    let center_calls = cache.len();
    let out = cache.remove(&key).expect("best probe is cached");
    Ok(LineSearchOutcome {
        x: out.x,
        value: out.value,
        alpha: best.x,
        queries: best.queries,
        center_calls,
        evals,
    })
}
