//! Adaptive nonparametric regression under dependent errors.
//!
//! The crate fits piecewise polynomials on regular partitions, selects the
//! partition size by penalized least squares with dependence-aware penalty
//! shapes, calibrates penalty constants by the dimension-jump slope
//! heuristic, and estimates the memory strength (Hurst exponent) of the
//! errors from the data or from residuals.
//!
//! All numeric code is generic over the scalar type through the
//! [`Scalar`] trait (`f32` or `f64`); the `*F64` aliases at the crate root
//! cover the common case.

// `!(x > 0)` rejects NaN parameters where `x <= 0` would let them through;
// indexed loops in the triangular/Toeplitz kernels mirror the algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod covariance;
mod error;
pub mod experiment;
pub mod hurst;
mod linalg;
pub mod methods;
pub mod penalty;
pub mod piecewise;
pub mod processes;
mod scalar;
pub mod selection;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use covariance::{AutocovarianceSequence, CovarianceModel};
pub use experiment::{ExperimentConfig, RiskReport};
pub use hurst::WhittleFit;
pub use methods::{MethodKind, MethodResult, MethodSpec};
pub use penalty::{ModelWeights, PenaltyShape};
pub use piecewise::{PartitionModel, PiecewiseFit};
pub use processes::{ProcessSpec, Seed};
pub use selection::{DimensionJumpResult, SelectionPath};

pub type PiecewiseFitF64 = piecewise::PiecewiseFit<f64>;
pub type ContrastCurveF64 = piecewise::ContrastCurve<f64>;
pub type AutocovarianceSequenceF64 = covariance::AutocovarianceSequence<f64>;
pub type CovarianceModelF64 = covariance::CovarianceModel<f64>;
pub type PenaltyShapeF64 = penalty::PenaltyShape<f64>;
pub type ModelWeightsF64 = penalty::ModelWeights<f64>;
pub type SelectionPathF64 = selection::SelectionPath<f64>;
pub type DimensionJumpResultF64 = selection::DimensionJumpResult<f64>;
pub type PeriodogramF64 = hurst::Periodogram<f64>;
pub type WhittleFitF64 = hurst::WhittleFit<f64>;
pub type MethodResultF64 = methods::MethodResult<f64>;
pub type RiskReportF64 = experiment::RiskReport<f64>;
