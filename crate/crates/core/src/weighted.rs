//! Weighted points: round weights to integer multiplicities, then solve the
//! implicit multiset with the sampling or the interior-point route.

use rand::Rng;

use crate::accurate::accurate_median;
use crate::error::{GeomedError, Result};
use crate::model::{eval_f, MedianResult, PointSet, SolverConfig};
use crate::scalar::{from_usize, lit, Scalar};
use crate::stochastic::approximate_median;

/// Integer multiplicities `w1 = floor(n w / (eps' W))`, `eps' = eps / 5`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundedWeights<T> {
    pub w1: Vec<u64>,
    pub eps_prime: T,
    /// `W = sum w`.
    pub total: T,
    /// `W0 = sum w0 = n / eps'`.
    pub scaled_total: T,
    /// `W1 = sum w1`.
    pub rounded_total: u64,
}

pub fn round_weights<T: Scalar>(w: &[T], eps: T) -> Result<RoundedWeights<T>> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(GeomedError::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    if w.iter().any(|&v| !(v >= T::zero() && v.is_finite())) {
        return Err(GeomedError::InvalidWeights("weights must be finite and non-negative".into()));
    }
    let total: T = w.iter().copied().sum();
    if !(total > T::zero()) {
        return Err(GeomedError::InvalidWeights("all weights are zero".into()));
    }
    let eps_prime = eps / lit(5.0);
    let factor = from_usize::<T>(w.len()) / (eps_prime * total);
    let w0: Vec<T> = w.iter().map(|&v| factor * v).collect();
    let w1: Vec<u64> = w0
        .iter()
        .map(|v| v.floor().to_u64().expect("rounded weight fits in u64"))
        .collect();
    let rounded_total: u64 = w1.iter().sum();
    // sum w0 = n / eps' >= n, so some w0 >= 1.
    assert!(rounded_total > 0, "rounded weights vanished");
    Ok(RoundedWeights {
        scaled_total: w0.iter().copied().sum(),
        w1,
        eps_prime,
        total,
        rounded_total,
    })
}

/// Vose's alias table: `O(n)` build, `O(1)` draws.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasSampler {
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasSampler {
    pub fn new<T: Scalar>(w: &[T]) -> Result<Self> {
        let w: Vec<f64> = w.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect();
        if w.is_empty() {
            return Err(GeomedError::EmptyPointSet);
        }
        if w.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(GeomedError::InvalidWeights("weights must be finite and non-negative".into()));
        }
        let total: f64 = w.iter().sum();
        if !(total > 0.0) {
            return Err(GeomedError::InvalidWeights("all weights are zero".into()));
        }
        let n = w.len();
        let mut scaled: Vec<f64> = w.iter().map(|&v| v * n as f64 / total).collect();
        let mut prob = vec![1.0; n];
        let mut alias: Vec<usize> = (0..n).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| scaled[i] < 1.0);
        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            prob[s] = scaled[s];
            alias[s] = l;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in small.into_iter().chain(large) {
            prob[i] = 1.0;
        }
        // Zero-weight entries must never be drawn, even via rounding.
        for i in 0..n {
            if w[i] == 0.0 && prob[i] == 1.0 && alias[i] == i {
                return Err(GeomedError::InvalidWeights("alias construction failed".into()));
            }
        }
        Ok(Self { prob, alias })
    }

    pub fn len(&self) -> usize {
        self.prob.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prob.is_empty()
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let i = rng.random_range(0..self.prob.len());
        if rng.random::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i]
        }
    }
}

/// `(1 + eps)`-approximate weighted median.
///
/// Weights are rounded to multiplicities; if `eps > n^{-1/2}` the sampling
/// route runs on them, otherwise the interior-point route with `n` replaced by
/// the multiset size. Both run at accuracy `eps / 5`. Equal weights skip the
/// rounding since they do not move the minimizer.
pub fn weighted_median<T: Scalar>(ps: &PointSet<T>, cfg: &SolverConfig<T>) -> Result<MedianResult<T>> {
    cfg.validate()?;
    let eps = cfg.eps;
    let stochastic_route = eps > from_usize::<T>(ps.len()).sqrt().recip();
    let solve = |set: &PointSet<T>, eps: T| -> Result<MedianResult<T>> {
        if stochastic_route {
            approximate_median(set, eps, cfg.seed)
        } else {
            let mut inner = cfg.clone();
            inner.eps = eps;
            accurate_median(set, &inner)
        }
    };
    let Some(w) = ps.weights() else {
        return solve(ps, eps);
    };
    let mut out = if w.iter().all(|&v| v == w[0]) {
        solve(&ps.unweighted(), eps)?
    } else {
        let rounded = round_weights(w, eps)?;
        let mult = rounded.w1.iter().map(|&m| lit::<T>(m as f64)).collect();
        let multiset = ps.unweighted().with_weights(mult)?;
        solve(&multiset, eps / lit(5.0))?
    };
    out.objective = eval_f(ps, &out.x)?;
    Ok(out)
}
