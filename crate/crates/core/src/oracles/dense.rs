use nalgebra::{DMatrix, DVector};

use crate::error::{GeomedError, Result};

pub(crate) fn matrix(a: &[f64], d: usize) -> DMatrix<f64> {
    DMatrix::from_row_slice(d, d, a)
}

/// Ascending eigenvalues of a symmetric row-major `d x d` matrix.
pub fn sym_eigenvalues(a: &[f64], d: usize) -> Vec<f64> {
    let m = matrix(a, d);
    let sym = (&m + m.transpose()) * 0.5;
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Ascending eigenvalues of the pencil `(h, q)`, `q` positive definite:
/// the spectrum of `L^{-1} h L^{-T}` with `q = L L^T`.
pub fn generalized_eigenvalues(h: &[f64], q: &[f64], d: usize) -> Result<Vec<f64>> {
    let chol = matrix(q, d)
        .cholesky()
        .ok_or_else(|| GeomedError::Oracle("pencil matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomedError::Oracle("singular Cholesky factor".into()))?;
    let m = &linv * matrix(h, d) * linv.transpose();
    Ok(sym_eigenvalues(m.as_slice(), d))
}

/// Solves `(h + shift I) x = b` for symmetric positive definite `h + shift I`.
pub(crate) fn spd_solve(h: &[f64], d: usize, shift: f64, b: &[f64]) -> Option<Vec<f64>> {
    let mut m = matrix(h, d);
    for i in 0..d {
        m[(i, i)] += shift;
    }
    let chol = m.cholesky()?;
    let x = chol.solve(&DVector::from_column_slice(b));
    x.iter().all(|v| v.is_finite()).then(|| x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pencil_of_diagonals() {
        let ev = generalized_eigenvalues(&[2.0, 0.0, 0.0, 9.0], &[1.0, 0.0, 0.0, 3.0], 2).unwrap();
        assert!((ev[0] - 2.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        assert!(generalized_eigenvalues(&[1.0], &[-1.0], 1).is_err());
    }
}
