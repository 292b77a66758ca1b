//! Intra-hour solar irradiance forecasting via the clearness index.
//!
//! The pipeline: compute Bird clear-sky irradiance for a site, form the
//! clearness index from measured data, forecast future index values with
//! additive Holt-Winters smoothing, and reconstruct irradiance as k̂
//! times the clear-sky value. Persistence and trailing-average baselines
//! plus a seeded randomized evaluation harness round out the toolkit.

pub mod baselines;
pub mod clear_sky;
pub mod error;
pub mod eval;
pub mod series;
pub mod solar;
pub mod synth;
pub mod tes;

pub use clear_sky::{ClearnessSeries, SiteAtmosphere};
pub use error::{Error, Result};
pub use series::{IrradianceSeries, Timestamp};
pub use solar::GeoLocation;
pub use synth::SynthConfig;
pub use tes::{Forecast, SeasonalInit, TesParams, TesState};
