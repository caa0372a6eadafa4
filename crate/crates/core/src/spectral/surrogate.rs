use crate::error::{GeomedError, Result};
use crate::scalar::{dot, Scalar};

/// `Q = scale I - drop u u^T` with `0 <= drop <= scale` and `u` a unit vector.
///
/// The smallest eigenvalue `scale - drop` is stored separately as `floor` so
/// that solves along `u` never recompute it by cancellation.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneSurrogate<T> {
    pub scale: T,
    pub drop: T,
    pub u: Vec<T>,
    floor: T,
}

impl<T: Scalar> RankOneSurrogate<T> {
    /// Builds `Q` from its large eigenvalue `scale` and the eigenvalue `floor`
    /// along `u`.
    pub fn new(scale: T, floor: T, u: Vec<T>) -> Self {
        let floor = floor.max(T::zero()).min(scale);
        Self {
            scale,
            drop: scale - floor,
            u,
            floor,
        }
    }

    /// Eigenvalue of `Q` along `u`.
    pub fn floor(&self) -> T {
        self.floor
    }

    /// `drop / scale`, the squared norm of `v` in the normalized form
    /// `Q = scale (I - v v^T)`.
    pub fn rho(&self) -> T {
        self.drop / self.scale
    }

    pub fn apply(&self, z: &[T]) -> Vec<T> {
        let c = dot(&self.u, z);
        z.iter()
            .zip(&self.u)
            .map(|(&zi, &ui)| self.scale * zi - self.drop * c * ui)
            .collect()
    }

    /// `||z||_Q^2`.
    pub fn quad(&self, z: &[T]) -> T {
        let c = dot(&self.u, z);
        self.scale * (dot(z, z) - c * c) + self.floor * c * c
    }
}

/// `Q^{-1} b` via Sherman-Morrison, in `O(d)`:
/// `(b - <u,b> u) / scale + <u,b> u / (scale - drop)`.
pub fn surrogate_solve<T: Scalar>(q: &RankOneSurrogate<T>, b: &[T]) -> Result<Vec<T>> {
    if !(q.floor > T::zero()) {
        return Err(GeomedError::SingularSurrogate);
    }
    if b.len() != q.u.len() {
        return Err(GeomedError::DimensionMismatch {
            expected: q.u.len(),
            got: b.len(),
        });
    }
    let c = dot(&q.u, b);
    Ok(b.iter()
        .zip(&q.u)
        .map(|(&bi, &ui)| (bi - c * ui) / q.scale + c * ui / q.floor)
        .collect())
}
