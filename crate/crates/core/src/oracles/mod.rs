//! Independent reference solvers and checkers. These work in `f64` with
//! dense linear algebra and are meant for tests, benchmarks, and `selftest`;
//! no solver calls into them.

mod checks;
mod dense;
mod newton;
mod weiszfeld;

pub use checks::{fd_gradient_check, fd_hessian_check, projected_gradient_qp};
pub use dense::{generalized_eigenvalues, sym_eigenvalues};
pub use newton::{ball_center_reference, central_path_reference};
pub use weiszfeld::{grid_reference, weiszfeld_reference, ReferenceMethod, ReferenceSolution};

use crate::model::PointSet;
use crate::scalar::Scalar;

/// Converts any point set to `f64` for the oracles.
pub fn as_f64<T: Scalar>(ps: &PointSet<T>) -> PointSet<f64> {
    ps.cast()
}
