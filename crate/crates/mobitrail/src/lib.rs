//! Mobility analytics over geotagged event streams: per-user radius of
//! gyration, five competing home-detection methods, cross-method agreement,
//! and a synthetic-cohort generator with planted ground truth for validating
//! the whole pipeline end to end.
//!
//! The geometry and statistics kernels are generic over the scalar type
//! (`f32` or `f64` via [`scalar::Real`]); the pipeline itself runs in `f64`,
//! and the aliases at the crate root pin that choice.

pub mod agreement;
pub mod cli;
pub mod error;
pub mod geo;
pub mod gyration;
pub mod home;
pub mod ingest;
pub mod partition;
pub mod report;
pub mod scalar;
pub mod stats;
pub mod synth;
pub mod trace;

pub use error::{Error, Result};
pub use trace::{Event, UserId, UserTrace};

/// Pipeline-precision geographic point.
pub type Point = geo::GeoPoint<f64>;
/// Pipeline-precision empirical CDF.
pub type Ecdf = stats::EcdfSeries<f64>;
/// Pipeline-precision five-number boxplot summary.
pub type Boxplot = stats::BoxplotStats<f64>;
