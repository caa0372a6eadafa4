//! Synthetic instances for tests and benchmarks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::model::PointSet;
use crate::scalar::{lit, Scalar};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// `n` standard normal points in `d` dimensions.
pub fn gaussian<T: Scalar, R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<PointSet<T>> {
    PointSet::new((0..n * d).map(|_| lit(normal(rng))).collect(), d)
}

/// Mixture of `k` unit-variance clusters with centers drawn from `N(0, 25 I)`,
/// points assigned round-robin.
pub fn clustered<T: Scalar, R: Rng + ?Sized>(n: usize, d: usize, k: usize, rng: &mut R) -> Result<PointSet<T>> {
    let k = k.max(1);
    let centers: Vec<f64> = (0..k * d).map(|_| 5.0 * normal(rng)).collect();
    let coords = (0..n)
        .flat_map(|i| {
            let c = i % k;
            (0..d).map(|j| centers[c * d + j] + normal(rng)).collect::<Vec<_>>()
        })
        .map(lit)
        .collect();
    PointSet::new(coords, d)
}

/// A standard normal cluster around the origin with `round(frac * n)` points
/// moved to random directions at distance `distance`.
#[derive(Debug, Clone)]
pub struct Corrupted<T> {
    pub points: PointSet<T>,
    /// Center of the clean cluster (the origin).
    pub clean_center: Vec<T>,
    pub corrupted: Vec<usize>,
}

pub fn corrupted<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    d: usize,
    frac: f64,
    distance: f64,
    rng: &mut R,
) -> Result<Corrupted<T>> {
    let m = ((frac * n as f64).round() as usize).min(n);
    let mut coords: Vec<f64> = (0..n * d).map(|_| normal(rng)).collect();
    let corrupted: Vec<usize> = (n - m..n).collect();
    for &i in &corrupted {
        let dir: Vec<f64> = (0..d).map(|_| normal(rng)).collect();
        let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        for j in 0..d {
            coords[i * d + j] = distance * dir[j] / len;
        }
    }
    Ok(Corrupted {
        points: PointSet::new(coords.into_iter().map(lit).collect(), d)?,
        clean_center: vec![T::zero(); d],
        corrupted,
    })
}
