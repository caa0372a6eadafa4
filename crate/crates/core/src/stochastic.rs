//! The sampling route: a constant-factor estimate from distance percentiles,
//! then projected stochastic subgradient descent with iterate averaging.

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{GeomedError, Result};
use crate::model::{eval_f, MedianResult, Method, PointSet};
use crate::rng::seeded;
use crate::scalar::{from_usize, lit, sq_dist, Scalar};
use crate::weighted::AliasSampler;

/// Order statistic at 1-based index `ceil(pct/100 * len)` of the ascending sort.
pub fn percentile_radius<T: Scalar>(dists: &[T], pct: u32) -> Result<T> {
    if dists.is_empty() {
        return Err(GeomedError::EmptyPointSet);
    }
    if !(1..=100).contains(&pct) {
        return Err(GeomedError::InvalidParameter(format!(
            "percentile must lie in 1..=100, got {pct}"
        )));
    }
    let mut sorted = dists.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let idx = (pct as usize * sorted.len()).div_ceil(100).max(1);
    Ok(sorted[idx - 1])
}

/// Draws point indices with probability proportional to their weight.
#[derive(Debug, Clone, PartialEq)]
pub enum PointSampler {
    Uniform(usize),
    Alias(AliasSampler),
}

impl PointSampler {
    pub fn for_points<T: Scalar>(ps: &PointSet<T>) -> Result<Self> {
        match ps.weights() {
            Some(w) => Ok(Self::Alias(AliasSampler::new(w)?)),
            None => Ok(Self::Uniform(ps.len())),
        }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self {
            Self::Uniform(n) => rng.random_range(0..*n),
            Self::Alias(a) => a.sample(rng),
        }
    }
}

/// Crude estimate: a data point whose 65th-percentile distance to a sample
/// is smallest, together with that distance.
#[derive(Debug, Clone, PartialEq)]
pub struct CrudeEstimate<T> {
    pub center: Vec<T>,
    pub center_index: usize,
    /// `lambda`, the 65th-percentile distance from `center` to the sample.
    pub radius: T,
    pub k_samples: usize,
}

/// Sample `S1, S2` of size `k`; return the `i` in `S2` minimizing the 65th
/// percentile of distances to `S1`.
///
/// Unweighted sets are sampled without replacement (all of `[n]` once
/// `k >= n`); weighted sets are sampled with replacement by weight.
pub fn crude_approximate<T: Scalar, R: Rng + ?Sized>(
    ps: &PointSet<T>,
    k: usize,
    rng: &mut R,
) -> Result<CrudeEstimate<T>> {
    if k == 0 {
        return Err(GeomedError::InvalidParameter("sample size must be positive".into()));
    }
    let n = ps.len();
    let (s1, s2): (Vec<usize>, Vec<usize>) = match ps.weights() {
        Some(w) => {
            let alias = AliasSampler::new(w)?;
            let s1 = (0..k).map(|_| alias.sample(rng)).collect();
            let s2 = (0..k).map(|_| alias.sample(rng)).collect();
            (s1, s2)
        }
        None if k >= n => ((0..n).collect(), (0..n).collect()),
        None => (sample(rng, n, k).into_vec(), sample(rng, n, k).into_vec()),
    };
    let mut dists = Vec::with_capacity(s1.len());
    let mut best: Option<(T, usize)> = None;
    for &i in &s2 {
        dists.clear();
        dists.extend(s1.iter().map(|&j| sq_dist(ps.point(i), ps.point(j)).sqrt()));
        let r = percentile_radius(&dists, 65)?;
        if best.is_none_or(|(b, _)| r < b) {
            best = Some((r, i));
        }
    }
    let (radius, center_index) = best.expect("non-empty sample");
    Ok(CrudeEstimate {
        center: ps.point(center_index).to_vec(),
        center_index,
        radius,
        k_samples: k,
    })
}

/// Step count, step size, and feasible ball of the subgradient phase.
#[derive(Debug, Clone, PartialEq)]
pub struct SgdParams<T> {
    pub steps: usize,
    pub eta: T,
    pub ball_radius: T,
    pub start: Vec<T>,
}

/// `T = ceil((60/eps)^2)`.
pub fn sgd_steps<T: Scalar>(eps: T) -> usize {
    (lit::<T>(60.0) / eps)
        .powi(2)
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
}

/// Crude-phase sample size `ceil(60/eps) = ceil(sqrt(T))`.
pub fn crude_samples<T: Scalar>(eps: T) -> usize {
    (lit::<T>(60.0) / eps).ceil().to_usize().unwrap_or(usize::MAX)
}

impl<T: Scalar> SgdParams<T> {
    /// `eta = (6 lambda / N) sqrt(2 / T)`, ball radius `6 lambda`.
    pub fn new(eps: T, crude: &CrudeEstimate<T>, n_eff: T) -> Self {
        let steps = sgd_steps(eps);
        let six_l = lit::<T>(6.0) * crude.radius;
        let eta = six_l / n_eff * (lit::<T>(2.0) / from_usize::<T>(steps)).sqrt();
        Self {
            steps,
            eta,
            ball_radius: six_l,
            start: crude.center.clone(),
        }
    }
}

/// Projected subgradient descent; returns the average of the `T` iterates
/// `x^(1)..x^(T)`. `observer` sees every iterate before it is averaged.
pub fn sgd_phase<T: Scalar, R: Rng + ?Sized>(
    ps: &PointSet<T>,
    params: &SgdParams<T>,
    sampler: &PointSampler,
    rng: &mut R,
    observer: &mut dyn FnMut(&[T]),
) -> Vec<T> {
    let d = ps.dim();
    let n_eff = ps.total_weight();
    let mut x = params.start.clone();
    let mut sum = vec![T::zero(); d];
    let mut diff = vec![T::zero(); d];
    let r2 = params.ball_radius * params.ball_radius;
    for _ in 0..params.steps {
        observer(&x);
        for (s, &xi) in sum.iter_mut().zip(&x) {
            *s += xi;
        }
        let a = ps.point(sampler.sample(rng));
        let dist = sq_dist(&x, a).sqrt();
        if dist > T::zero() {
            let c = params.eta * n_eff / dist;
            for (xi, &ai) in x.iter_mut().zip(a) {
                *xi -= c * (*xi - ai);
            }
        }
        for ((dj, &xj), &sj) in diff.iter_mut().zip(&x).zip(&params.start) {
            *dj = xj - sj;
        }
        let off2 = diff.iter().fold(T::zero(), |acc, &v| acc + v * v);
        if off2 > r2 {
            let shrink = params.ball_radius / off2.sqrt();
            for ((xj, &dj), &sj) in x.iter_mut().zip(&diff).zip(&params.start) {
                *xj = sj + dj * shrink;
            }
        }
    }
    let inv = from_usize::<T>(params.steps.max(1)).recip();
    sum.iter().map(|&s| s * inv).collect()
}

/// `(1 + eps)`-approximate median in expectation, `O(d / eps^2)` after the
/// crude phase.
pub fn approximate_median<T: Scalar>(ps: &PointSet<T>, eps: T, seed: u64) -> Result<MedianResult<T>> {
    let mut out = approximate_median_with_rng(ps, eps, &mut seeded(seed))?;
    out.seed = seed;
    Ok(out)
}

/// As [`approximate_median`] with a caller-supplied stream (`seed` is left 0).
pub fn approximate_median_with_rng<T: Scalar, R: Rng + ?Sized>(
    ps: &PointSet<T>,
    eps: T,
    rng: &mut R,
) -> Result<MedianResult<T>> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(GeomedError::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let crude = crude_approximate(ps, crude_samples(eps), rng)?;
    let params = SgdParams::new(eps, &crude, ps.total_weight());
    let sampler = PointSampler::for_points(ps)?;
    let x = sgd_phase(ps, &params, &sampler, rng, &mut |_| {});
    Ok(MedianResult {
        objective: eval_f(ps, &x)?,
        x,
        method: Method::Stochastic,
        outer_iters: params.steps,
        inner_evals: params.steps,
        seed: 0,
    })
}

/// `((2n - 2|S|) / (n - 2|S|)) max_{i not in S} ||a(i) - x||`: any geometric
/// median lies within this distance of `x` whatever the points in `S` are.
pub fn robust_bound_check<T: Scalar>(ps: &PointSet<T>, x: &[T], s: &[usize]) -> Result<T> {
    ps.check_dim(x)?;
    let n = ps.len();
    let mut excluded = vec![false; n];
    for &i in s {
        if i >= n {
            return Err(GeomedError::InvalidParameter(format!("index {i} out of range")));
        }
        excluded[i] = true;
    }
    let m = excluded.iter().filter(|&&e| e).count();
    if 2 * m >= n {
        return Err(GeomedError::InvalidParameter(format!(
            "excluded set of size {m} is not below n/2 = {}",
            n as f64 / 2.0
        )));
    }
    let far = (0..n)
        .filter(|&i| !excluded[i])
        .map(|i| sq_dist(ps.point(i), x))
        .fold(T::zero(), T::max)
        .sqrt();
    let coef = from_usize::<T>(2 * n - 2 * m) / from_usize::<T>(n - 2 * m);
    Ok(coef * far)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentile_examples() {
        assert_eq!(percentile_radius(&[1.0, 2.0, 3.0, 4.0, 5.0], 60).unwrap(), 3.0);
        assert_eq!(percentile_radius(&[7.0], 13).unwrap(), 7.0);
        assert_eq!(percentile_radius(&[5.0, 1.0, 3.0], 65).unwrap(), 3.0);
        assert!(percentile_radius::<f64>(&[], 50).is_err());
    }

    #[test]
    fn parameters() {
        assert_eq!(sgd_steps(0.1), 360_000);
        assert_eq!(crude_samples(0.1), 600);
        let crude = CrudeEstimate {
            center: vec![0.0],
            center_index: 0,
            radius: 0.0,
            k_samples: 1,
        };
        assert_eq!(SgdParams::new(0.5, &crude, 4.0).eta, 0.0);
    }

    #[test]
    fn identical_points() {
        let ps = PointSet::new(vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0], 2).unwrap();
        let r = approximate_median(&ps, 0.5, 3).unwrap();
        assert_eq!(r.x, vec![1.0, -1.0]);
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn robust_coefficients() {
        let ps = PointSet::new((0..10).map(|i| i as f64).collect(), 1).unwrap();
        let b0 = robust_bound_check(&ps, &[0.0], &[]).unwrap();
        assert_eq!(b0, 18.0);
        let b = robust_bound_check(&ps, &[0.0], &[6, 7, 8, 9]).unwrap();
        assert_eq!(b, 6.0 * 5.0);
        assert!(robust_bound_check(&ps, &[0.0], &[0, 1, 2, 3, 4]).is_err());
    }
}
