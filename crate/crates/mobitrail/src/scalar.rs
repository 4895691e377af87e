//! Scalar abstraction for the numeric kernels.
//!
//! Geometry and summary statistics are generic over [`Real`] so they can run
//! in `f32` or `f64`; the event pipeline pins everything to `f64` through the
//! aliases at the crate root.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable by the geometry and statistics kernels.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lossy conversion to `f64`, for reporting and serialization.
    fn as_f64(self) -> f64;
}

impl Real for f32 {
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn as_f64(self) -> f64 {
        self
    }
}

/// Shorthand for `T::from_f64(x).unwrap()` on constants known to fit.
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant representable in scalar type")
}
