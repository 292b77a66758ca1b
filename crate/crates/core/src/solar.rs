//! Sun position, relative optical air mass and extraterrestrial irradiance.
//!
//! The ephemeris is the NOAA low-precision algorithm built on Spencer's
//! Fourier fits for declination, equation of time and the Earth-Sun
//! distance factor. Accuracy is a few hundredths of a degree in zenith,
//! well inside the tolerance the clear-sky model needs.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::series::Timestamp;

/// Solar constant in W/m².
pub const SOLAR_CONSTANT: f64 = 1367.0;

/// Standard sea-level pressure in hPa.
pub const STANDARD_PRESSURE_HPA: f64 = 1013.25;

/// A validated geographic location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoLocation {
    latitude: f64,
    longitude: f64,
    elevation: f64,
}

impl GeoLocation {
    pub fn new(latitude: f64, longitude: f64, elevation: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&latitude) {
            return Err(Error::Validation(format!("latitude {latitude} outside [-90, 90]")));
        }
        if !(-180.0..=180.0).contains(&longitude) {
            return Err(Error::Validation(format!("longitude {longitude} outside [-180, 180]")));
        }
        if !(elevation >= -500.0 && elevation.is_finite()) {
            return Err(Error::Validation(format!("elevation {elevation} below -500 m")));
        }
        Ok(GeoLocation { latitude, longitude, elevation })
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }

    pub fn elevation(&self) -> f64 {
        self.elevation
    }
}

/// Geometric sun position at an instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolarPosition {
    /// Angle from local vertical, degrees in [0, 180].
    pub zenith: f64,
    /// Degrees clockwise from north, [0, 360).
    pub azimuth: f64,
    /// Fractional-year angle in radians.
    pub day_angle: f64,
    /// Irradiance scaling for Earth-Sun distance, near 1.
    pub earth_sun_distance_factor: f64,
}

impl SolarPosition {
    pub fn elevation_angle(&self) -> f64 {
        90.0 - self.zenith
    }
}

fn check_year(t: Timestamp) -> Result<()> {
    let y = t.year();
    if !(1900..=2100).contains(&y) {
        return Err(Error::TimestampRange(format!("year {y} outside 1900-2100")));
    }
    Ok(())
}

/// Fractional-year angle (radians) for Spencer's Fourier fits.
///
/// Phased from the J2000 epoch with a 365.25-day year so the angle does
/// not drift across the leap cycle.
fn fractional_year(t: Timestamp) -> f64 {
    const J2000_UNIX: i64 = 946_728_000; // 2000-01-01T12:00:00Z
    let days = (t.unix_seconds() - J2000_UNIX) as f64 / 86_400.0;
    2.0 * PI * days.rem_euclid(365.25) / 365.25
}

/// Spencer eccentricity correction: the (r0/r)² irradiance factor.
fn distance_factor(day_angle: f64) -> f64 {
    let g = day_angle;
    1.00011 + 0.034221 * g.cos() + 0.00128 * g.sin() + 0.000719 * (2.0 * g).cos()
        + 0.000077 * (2.0 * g).sin()
}

/// Spencer solar declination, radians.
fn declination(day_angle: f64) -> f64 {
    let g = day_angle;
    0.006918 - 0.399912 * g.cos() + 0.070257 * g.sin() - 0.006758 * (2.0 * g).cos()
        + 0.000907 * (2.0 * g).sin()
        - 0.002697 * (3.0 * g).cos()
        + 0.00148 * (3.0 * g).sin()
}

/// Equation of time in minutes.
fn equation_of_time(day_angle: f64) -> f64 {
    let g = day_angle;
    229.18
        * (0.000075 + 0.001868 * g.cos() - 0.032077 * g.sin() - 0.014615 * (2.0 * g).cos()
            - 0.040849 * (2.0 * g).sin())
}

/// Computes the geometric sun position for a location and UTC instant.
pub fn sun_position(loc: &GeoLocation, t: Timestamp) -> Result<SolarPosition> {
    check_year(t)?;
    let day_angle = fractional_year(t);
    let decl = declination(day_angle);
    let eqtime = equation_of_time(day_angle);

    // true solar time in minutes, from UTC clock time
    let tst = t.fractional_hour() * 60.0 + eqtime + 4.0 * loc.longitude();
    let hour_angle = (tst / 4.0 - 180.0).to_radians();

    let lat = loc.latitude().to_radians();
    let cos_zen = lat.sin() * decl.sin() + lat.cos() * decl.cos() * hour_angle.cos();
    let zenith = cos_zen.clamp(-1.0, 1.0).acos();

    // azimuth measured from south, westward positive, then shifted to
    // clockwise-from-north
    let az_south = hour_angle
        .sin()
        .atan2(hour_angle.cos() * lat.sin() - decl.tan() * lat.cos());
    let azimuth = (az_south.to_degrees() + 180.0).rem_euclid(360.0);

    Ok(SolarPosition {
        zenith: zenith.to_degrees(),
        azimuth,
        day_angle,
        earth_sun_distance_factor: distance_factor(day_angle),
    })
}

/// Kasten-Young 1989 relative optical air mass, pressure-corrected.
///
/// Returns `None` when the sun is at or below the horizon; the caller
/// treats such samples as night.
pub fn air_mass(zenith_deg: f64, pressure_hpa: f64) -> Option<f64> {
    if !(0.0..90.0).contains(&zenith_deg) {
        return None;
    }
    let m = 1.0
        / (zenith_deg.to_radians().cos()
            + 0.50572 * (96.07995 - zenith_deg).powf(-1.6364));
    Some(m * pressure_hpa / STANDARD_PRESSURE_HPA)
}

/// Uncorrected (sea-level) Kasten-Young air mass.
pub fn relative_air_mass(zenith_deg: f64) -> Option<f64> {
    air_mass(zenith_deg, STANDARD_PRESSURE_HPA)
}

/// Extraterrestrial irradiance: solar constant scaled by the Earth-Sun
/// distance eccentricity factor.
pub fn extraterrestrial_irradiance(t: Timestamp) -> Result<f64> {
    check_year(t)?;
    Ok(SOLAR_CONSTANT * distance_factor(fractional_year(t)))
}
