//! Nonparametric estimation of multiplicatively structured hazard rates from
//! filtered count data, with an application to forecasting outstanding claim
//! counts from run-off triangles.
//!
//! The pipeline: bin events onto a triangle, reverse the time axis so the
//! right truncation becomes a left truncation, build discrete occurrence and
//! exposure surfaces, smooth them with local constant or local linear kernel
//! weights, project the smoothed pair onto the multiplicative hazard space by
//! a Gauss-Seidel fixed-point iteration, select bandwidths by leave-out
//! cross-validation, and turn the fitted components into conditional report
//! densities, reserves and cash flows. A classical chain-ladder baseline is
//! included for comparison.
//!
//! All numeric code is generic over the scalar type via [`Scalar`]; concrete
//! `f64` aliases are exported at the crate root.

pub mod backfit;
pub mod cv;
pub mod data;
pub mod error;
pub mod forecast;
pub mod io;
pub mod kernel;
pub mod sim;
pub mod smooth;

mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` occurrence/exposure grid, the default precision.
pub type Grid64 = data::OccurrenceExposureGrid<f64>;
/// `f64` smoothed hazard surface.
pub type HazardSurface64 = smooth::HazardSurface<f64>;
/// `f64` multiplicative fit.
pub type MultiplicativeFit64 = backfit::MultiplicativeFit<f64>;
/// `f64` bandwidth vector.
pub type Bandwidth64 = kernel::Bandwidth<f64>;
/// `f64` conditional report-time density.
pub type ConditionalDensity64 = forecast::ConditionalDensity<f64>;
/// `f64` reserve forecast.
pub type ReserveForecast64 = forecast::ReserveForecast<f64>;
