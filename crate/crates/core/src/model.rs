//! Problem instance, solver configuration, and result types shared by every
//! solver in the crate.

use std::fmt;

use crate::error::{GeomedError, Result};
use crate::scalar::{from_usize, lit, sq_dist, Scalar};

/// The input points `a(1), .., a(n)` in `d` dimensions, row-major, with
/// optional non-negative per-point weights (multiplicities).
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet<T> {
    coords: Vec<T>,
    weights: Option<Vec<T>>,
    n: usize,
    d: usize,
}

impl<T: Scalar> PointSet<T> {
    /// Builds an unweighted point set from a flat row-major buffer.
    pub fn new(coords: Vec<T>, d: usize) -> Result<Self> {
        if d == 0 || coords.is_empty() {
            return Err(GeomedError::EmptyPointSet);
        }
        if !coords.len().is_multiple_of(d) {
            return Err(GeomedError::DimensionMismatch {
                expected: d,
                got: coords.len() % d,
            });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeomedError::NonFinite("point coordinates"));
        }
        let n = coords.len() / d;
        Ok(Self {
            coords,
            weights: None,
            n,
            d,
        })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let d = rows.first().map(Vec::len).ok_or(GeomedError::EmptyPointSet)?;
        let mut coords = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(GeomedError::DimensionMismatch {
                    expected: d,
                    got: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::new(coords, d)
    }

    /// Attaches weights. Points with weight zero are dropped.
    pub fn with_weights(self, weights: Vec<T>) -> Result<Self> {
        if weights.len() != self.n {
            return Err(GeomedError::DimensionMismatch {
                expected: self.n,
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) {
            return Err(GeomedError::InvalidWeights(
                "weights must be finite and non-negative".into(),
            ));
        }
        if weights.iter().all(|w| w.is_zero()) {
            return Err(GeomedError::InvalidWeights("all weights are zero".into()));
        }
        let d = self.d;
        let mut coords = Vec::with_capacity(self.coords.len());
        let mut kept = Vec::with_capacity(weights.len());
        for (i, &w) in weights.iter().enumerate() {
            if w > T::zero() {
                coords.extend_from_slice(&self.coords[i * d..(i + 1) * d]);
                kept.push(w);
            }
        }
        Ok(Self {
            n: kept.len(),
            coords,
            weights: Some(kept),
            d,
        })
    }

    /// Same points, weights removed.
    pub fn unweighted(&self) -> Self {
        Self {
            coords: self.coords.clone(),
            weights: None,
            n: self.n,
            d: self.d,
        }
    }

    /// Same points and weights in another scalar type.
    pub fn cast<U: Scalar>(&self) -> PointSet<U> {
        let conv = |v: &T| <U as num_traits::NumCast>::from(*v).expect("finite value converts");
        PointSet {
            coords: self.coords.iter().map(conv).collect(),
            weights: self.weights.as_ref().map(|w| w.iter().map(conv).collect()),
            n: self.n,
            d: self.d,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[T]> + '_ {
        self.coords.chunks_exact(self.d)
    }

    #[inline]
    pub fn weight(&self, i: usize) -> T {
        self.weights.as_ref().map_or(T::one(), |w| w[i])
    }

    pub fn weights(&self) -> Option<&[T]> {
        self.weights.as_deref()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    /// Sum of weights; the multiset size when weights are integral.
    pub fn total_weight(&self) -> T {
        match &self.weights {
            Some(w) => w.iter().copied().sum(),
            None => from_usize(self.n),
        }
    }

    /// True when every point coincides with the first one.
    pub fn all_identical(&self) -> bool {
        let first = self.point(0);
        self.points().all(|p| p == first)
    }

    pub(crate) fn check_dim(&self, x: &[T]) -> Result<()> {
        if x.len() != self.d {
            return Err(GeomedError::DimensionMismatch {
                expected: self.d,
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// `f(x) = sum_i w_i ||x - a(i)||`.
pub fn eval_f<T: Scalar>(ps: &PointSet<T>, x: &[T]) -> Result<T> {
    ps.check_dim(x)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(GeomedError::NonFinite("query point"));
    }
    Ok((0..ps.len())
        .map(|i| ps.weight(i) * sq_dist(x, ps.point(i)).sqrt())
        .sum())
}

/// Weighted arithmetic mean of the points.
pub fn mean_point<T: Scalar>(ps: &PointSet<T>) -> Vec<T> {
    let mut mean = vec![T::zero(); ps.dim()];
    for i in 0..ps.len() {
        let w = ps.weight(i);
        for (m, &c) in mean.iter_mut().zip(ps.point(i)) {
            *m += w * c;
        }
    }
    let total = ps.total_weight();
    mean.iter_mut().for_each(|m| *m /= total);
    mean
}

/// Coordinate-wise median, lower middle order statistic for even counts.
pub fn coordinate_median<T: Scalar>(ps: &PointSet<T>) -> Vec<T> {
    let mut column = Vec::with_capacity(ps.len());
    (0..ps.dim())
        .map(|j| {
            column.clear();
            column.extend(ps.points().map(|p| p[j]));
            column.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
            column[(column.len() - 1) / 2]
        })
        .collect()
}

/// Affine map `x -> (x - shift) / scale` used to condition the problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization<T> {
    pub shift: Vec<T>,
    pub scale: T,
}

impl<T: Scalar> Normalization<T> {
    pub fn apply_point(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(&self.shift)
            .map(|(&v, &s)| (v - s) / self.scale)
            .collect()
    }

    pub fn unapply_point(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .zip(&self.shift)
            .map(|(&v, &s)| v * self.scale + s)
            .collect()
    }

    pub fn apply(&self, ps: &PointSet<T>) -> PointSet<T> {
        let coords = ps
            .points()
            .flat_map(|p| self.apply_point(p))
            .collect::<Vec<_>>();
        PointSet {
            coords,
            weights: ps.weights.clone(),
            n: ps.n,
            d: ps.d,
        }
    }
}

/// Shifts by the coordinate-wise median and scales so that `f(mean) / W = 1`.
pub fn normalize<T: Scalar>(ps: &PointSet<T>) -> (PointSet<T>, Normalization<T>) {
    let shift = coordinate_median(ps);
    let shifted = Normalization {
        shift,
        scale: T::one(),
    };
    let moved = shifted.apply(ps);
    let mean = mean_point(&moved);
    let f_mean = eval_f(&moved, &mean).expect("mean has matching dimension");
    let per_weight = f_mean / moved.total_weight();
    if per_weight > T::zero() && per_weight.is_finite() {
        let norm = Normalization {
            shift: shifted.shift,
            scale: per_weight,
        };
        (norm.apply(ps), norm)
    } else {
        (moved, shifted)
    }
}

/// Balance between speed and literal adherence to the proof constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Long steps `1 + 1/60`, floored tolerances, early exits.
    Practical,
    /// Every constant exactly as in the analysis; only viable for tiny `n`.
    PaperFaithful,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Practical => "practical",
            Mode::PaperFaithful => "paper_faithful",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Accurate,
    Stochastic,
    Weiszfeld,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Accurate => "accurate",
            Method::Stochastic => "stochastic",
            Method::Weiszfeld => "weiszfeld",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// User-facing knobs of the interior-point solver. The size-dependent
/// tolerance cascade is derived by [`SolverConfig::tolerances`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub eps: T,
    pub mode: Mode,
    pub seed: u64,
    /// Path parameter growth is `1 + step_factor` per outer iteration.
    pub step_factor: T,
    pub max_outer_iters: usize,
    /// Power iterations are `ceil(power_constant * ln(3 max(n, 2) / eps))`.
    pub power_constant: T,
    /// Append a Weiszfeld polish to the interior-point output (practical only).
    pub polish: bool,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn new(eps: T, mode: Mode) -> Result<Self> {
        if !(eps > T::zero() && eps < T::one()) {
            return Err(GeomedError::InvalidParameter(format!(
                "eps must lie in (0, 1), got {eps}"
            )));
        }
        let step_factor = match mode {
            Mode::Practical => lit(1.0 / 60.0),
            Mode::PaperFaithful => lit(1.0 / 600.0),
        };
        Ok(Self {
            eps,
            mode,
            seed: 0,
            step_factor,
            max_outer_iters: 2_000_000,
            power_constant: lit(10.0),
            polish: false,
        })
    }

    pub fn practical(eps: T) -> Result<Self> {
        Self::new(eps, Mode::Practical)
    }

    pub fn paper_faithful(eps: T) -> Result<Self> {
        Self::new(eps, Mode::PaperFaithful)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > T::zero() && self.eps < T::one()) {
            return Err(GeomedError::InvalidParameter("eps must lie in (0, 1)".into()));
        }
        if !(self.step_factor > T::zero() && self.step_factor <= T::one()) {
            return Err(GeomedError::InvalidParameter(
                "step_factor must lie in (0, 1]".into(),
            ));
        }
        if self.mode == Mode::PaperFaithful && self.step_factor > lit(1.0 / 600.0) {
            return Err(GeomedError::InvalidParameter(
                "paper_faithful mode requires step_factor <= 1/600".into(),
            ));
        }
        if !(self.power_constant > T::zero()) {
            return Err(GeomedError::InvalidParameter(
                "power_constant must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Derives the tolerance cascade for a problem of (multiset) size `n_eff`.
    pub fn tolerances(&self, n_eff: T) -> Tolerances<T> {
        let eps_star = self.eps / lit(3.0);
        let seven_n = lit::<T>(7.0) * n_eff;
        let paper_v = lit::<T>(0.125) * (eps_star / seven_n).powi(2);
        let eps_v = match self.mode {
            Mode::PaperFaithful => paper_v,
            // Floor chosen so that eps_c = (eps_v/36)^{3/2} itself stays at or
            // above the floor.
            Mode::Practical => {
                let floor = T::tolerance_floor();
                paper_v.max(lit::<T>(36.0) * floor.powf(lit(2.0 / 3.0)))
            }
        };
        let eps_c = (eps_v / lit(36.0)).powf(lit(1.5));
        Tolerances {
            eps_star,
            eps_v,
            eps_c,
        }
    }

    /// Centering accuracy used inside one line search.
    ///
    /// `value_scale` is the magnitude of the penalized objective at the anchor;
    /// practical mode keeps the tolerance above what that value can resolve.
    pub fn line_search_tolerance(&self, eps: T, eps_star: T, n_eff: T, value_scale: T) -> T {
        let paper = (eps * eps_star / (lit::<T>(160.0) * n_eff * n_eff)).powi(2);
        match self.mode {
            Mode::PaperFaithful => paper,
            Mode::Practical => {
                let floor = T::tolerance_floor();
                paper.max(floor * value_scale.abs().max(T::one()))
            }
        }
    }
}

/// Tolerance cascade `(eps~*, eps_v, eps_c)` for one problem size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub eps_star: T,
    pub eps_v: T,
    pub eps_c: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MedianResult<T> {
    pub x: Vec<T>,
    pub objective: T,
    pub method: Method,
    pub outer_iters: usize,
    pub inner_evals: usize,
    pub seed: u64,
}
