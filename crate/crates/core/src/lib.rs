//! Analytic and Monte Carlo tools for a single-server facility serving
//! customers spread along a line.
//!
//! Customers at distance `y` from the facility arrive with intensity `h(y)`
//! (arrival rate per unit distance), collect a reward `R` for completed
//! service, pay `c_w` per unit time spent at the facility, and pay `c_t` per
//! unit distance traveled. The crate computes, for both a blocking (single
//! slot) system and a multi-slot observable queue with uniform demand:
//!
//! * the threshold distance below which joining is individually rational,
//! * the threshold that maximizes aggregate benefit per unit time,
//! * the ratio between optimal and equilibrium benefit rates,
//! * the large-threshold behavior of that ratio (limit, divergence, or
//!   oscillation), and
//! * discrete-event simulation estimates of the same quantities for
//!   cross-checking.
//!
//! All analytic modules are generic over the floating-point scalar via
//! [`Real`]; `f64` aliases are exported at the crate root. The simulator is
//! fixed at `f64`.

pub mod asymptotics;
pub mod error;
pub mod intensity;
pub mod loss;
pub mod numeric;
pub mod queue;
pub mod sim;
pub mod verify;

pub use error::{Error, Result};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Scalar type the analytic modules are generic over.
///
/// Implemented for `f32` and `f64`. The blanket constant conversion [`Real::lit`]
/// lets module code embed `f64` literals without per-type tables.
pub trait Real:
    Float + FloatConst + FromPrimitive + core::fmt::Debug + core::fmt::Display + Default + 'static
{
    /// Converts an `f64` literal, panicking if it is not representable.
    /// Intended for compile-time constants only.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("constant not representable in scalar type")
    }

    /// Lossy view as `f64`, for diagnostics.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Intensity64 = intensity::IntensityFunction<f64>;
pub type Intensity32 = intensity::IntensityFunction<f32>;
pub type Accuracy64 = numeric::quadrature::IntegralAccuracy<f64>;
pub type ModelParams64 = loss::ModelParams<f64>;
pub type LossSolution64 = loss::LossSolution<f64>;
pub type LimitEstimate64 = asymptotics::LimitEstimate<f64>;
pub type QueueParams64 = queue::QueueParams<f64>;
pub type Thresholds64 = queue::ThresholdVector<f64>;
pub type Stationary64 = queue::StationaryDistribution<f64>;
