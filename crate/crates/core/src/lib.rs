//! Geometric median (Fermat–Weber) solvers.
//!
//! * [`accurate_median`]: long-step interior point method following the
//!   central path of a smoothed penalty, `(1+eps)`-accurate.
//! * [`approximate_median`]: projected stochastic subgradient descent from a
//!   percentile-based crude estimate, `O(d / eps^2)` work after sampling.
//! * [`weighted_median`]: weights are rounded to integer multiplicities and
//!   dispatched to one of the above.
//!
//! Everything is generic over [`Scalar`] (`f32` / `f64`); the `*F64`
//! aliases below name the common instantiations.
// `!(a > b)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accurate;
pub mod centering;
pub mod error;
pub mod generate;
pub mod line_search;
pub mod model;
pub mod objective;
pub mod oracles;
pub mod rng;
pub mod scalar;
pub mod spectral;
pub mod stochastic;
pub mod weighted;

pub use accurate::{accurate_median, accurate_median_with_rng, central_path_schedule, ScheduleParams};
pub use centering::{local_center, CenterOptions, CenterOutcome};
pub use error::{GeomedError, Result};
pub use line_search::{line_search, one_dim_minimizer, OneDimOutcome, SearchInterval};
pub use model::{
    coordinate_median, eval_f, mean_point, normalize, MedianResult, Method, Mode, Normalization,
    PointSet, SolverConfig, Tolerances,
};
pub use objective::{eval_ft, ObjectiveEval, PathState};
pub use scalar::Scalar;
pub use spectral::{approx_min_eig, ball_rank1_qp, surrogate_solve, EigEstimate, RankOneSurrogate};
pub use stochastic::{approximate_median, crude_approximate, percentile_radius, robust_bound_check, CrudeEstimate, SgdParams};
pub use weighted::{round_weights, weighted_median, AliasSampler, RoundedWeights};

pub type PointSetF64 = PointSet<f64>;
pub type PointSetF32 = PointSet<f32>;
pub type SolverConfigF64 = SolverConfig<f64>;
pub type SolverConfigF32 = SolverConfig<f32>;
pub type MedianResultF64 = MedianResult<f64>;
pub type MedianResultF32 = MedianResult<f32>;
