//! Bird & Hulstrom (1981) clear-sky model and the clearness index.
//!
//! The transmittance formulas follow the published Bird formulation as
//! encoded in the widely used reference implementations; they are
//! validated against an independently evaluated oracle grid in the tests.

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::series::{IrradianceSeries, Timestamp};
use crate::solar::{self, GeoLocation};

/// Clear-sky irradiance below this level (W/m²) counts as night for the
/// clearness index; dividing by smaller values is numerically meaningless.
pub const NIGHT_THRESHOLD_WM2: f64 = 20.0;

/// Upper clamp for the clearness index. Admits real cloud-enhancement
/// above 1 while bounding sensor spikes.
pub const K_MAX: f64 = 1.5;

/// Neutral placeholder stored for night or invalid samples.
pub const K_PLACEHOLDER: f64 = 1.0;

/// Geographic coordinates plus the Bird atmospheric parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteAtmosphere {
    location: GeoLocation,
    ozone: f64,
    precipitable_water: f64,
    aod_380nm: f64,
    aod_500nm: f64,
    ground_albedo: f64,
    pressure: f64,
    forward_scatter: f64,
}

impl SiteAtmosphere {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        location: GeoLocation,
        ozone: f64,
        precipitable_water: f64,
        aod_380nm: f64,
        aod_500nm: f64,
        ground_albedo: f64,
        pressure: f64,
        forward_scatter: f64,
    ) -> Result<Self> {
        fn check(name: &str, v: f64, lo: f64, hi: f64, lo_open: bool) -> Result<()> {
            let ok = v.is_finite() && v <= hi && if lo_open { v > lo } else { v >= lo };
            if ok {
                Ok(())
            } else {
                Err(Error::Validation(format!("{name} = {v} outside allowed range")))
            }
        }
        check("ozone_atm_cm", ozone, 0.0, f64::INFINITY, true)?;
        check("water_atm_cm", precipitable_water, 0.0, f64::INFINITY, true)?;
        check("aod_380nm", aod_380nm, 0.0, f64::INFINITY, false)?;
        check("aod_500nm", aod_500nm, 0.0, f64::INFINITY, false)?;
        check("albedo", ground_albedo, 0.0, 1.0, false)?;
        check("pressure_hpa", pressure, 300.0, 1100.0, false)?;
        check("forward_scatter", forward_scatter, 0.0, 1.0, true)?;
        Ok(SiteAtmosphere {
            location,
            ozone,
            precipitable_water,
            aod_380nm,
            aod_500nm,
            ground_albedo,
            pressure,
            forward_scatter,
        })
    }

    /// The standard Bird reference atmosphere at a location.
    pub fn reference(location: GeoLocation) -> Self {
        SiteAtmosphere::new(location, 0.3, 1.5, 0.15, 0.1, 0.2, 1013.25, 0.84).unwrap()
    }

    pub fn location(&self) -> GeoLocation {
        self.location
    }

    pub fn ground_albedo(&self) -> f64 {
        self.ground_albedo
    }

    pub fn pressure(&self) -> f64 {
        self.pressure
    }

    /// Parses the flat key-value site config format.
    ///
    /// Keys (all required except `elevation_m`, default 0):
    /// `latitude` (deg), `longitude` (deg), `elevation_m` (m),
    /// `ozone_atm_cm`, `water_atm_cm`, `aod_380nm`, `aod_500nm`,
    /// `albedo`, `pressure_hpa`, `forward_scatter`.
    /// Lines starting with `#` and blank lines are ignored; unknown keys
    /// are an error.
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut fields: std::collections::BTreeMap<&str, f64> = Default::default();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", idx + 1)))?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Config(format!("line {}: invalid number for {key}", idx + 1))
            })?;
            const KNOWN: [&str; 10] = [
                "latitude",
                "longitude",
                "elevation_m",
                "ozone_atm_cm",
                "water_atm_cm",
                "aod_380nm",
                "aod_500nm",
                "albedo",
                "pressure_hpa",
                "forward_scatter",
            ];
            if !KNOWN.contains(&key) {
                return Err(Error::Config(format!("unknown key {key:?}")));
            }
            if fields.insert(key, value).is_some() {
                return Err(Error::Config(format!("duplicate key {key:?}")));
            }
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Config(format!("missing key {k:?}")))
        };
        let location = GeoLocation::new(
            get("latitude")?,
            get("longitude")?,
            fields.get("elevation_m").copied().unwrap_or(0.0),
        )?;
        SiteAtmosphere::new(
            location,
            get("ozone_atm_cm")?,
            get("water_atm_cm")?,
            get("aod_380nm")?,
            get("aod_500nm")?,
            get("albedo")?,
            get("pressure_hpa")?,
            get("forward_scatter")?,
        )
    }
}

/// All intermediate quantities of one Bird evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BirdComponents {
    /// Direct irradiance on the horizontal plane, W/m².
    pub direct: f64,
    /// Scattered (diffuse) irradiance, W/m².
    pub scattered: f64,
    /// Total clear-sky irradiance, W/m².
    pub total: f64,
    /// Atmospheric albedo.
    pub atmospheric_albedo: f64,
    pub t_rayleigh: f64,
    pub t_ozone: f64,
    pub t_gases: f64,
    pub t_water: f64,
    pub t_aerosol: f64,
    pub t_aerosol_absorption: f64,
}

/// The Bird transmittance polynomials turn nonphysical below ~1 degree of
/// solar elevation (the Rayleigh term exceeds 1 beyond air mass ~29).
/// Elevations under this cutoff contribute well below the night threshold
/// and are treated as night.
pub const HORIZON_CUTOFF_DEG: f64 = 89.0;

fn check_transmittance(name: &str, v: f64) -> Result<f64> {
    const GUARD: f64 = 1e-6;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else if (-GUARD..=1.0 + GUARD).contains(&v) {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(Error::NumericDomain(format!("transmittance {name} = {v} outside [0, 1]")))
    }
}

/// Evaluates the Bird model at a given zenith and extraterrestrial
/// irradiance. Returns `None` when the sun is at or below the horizon
/// (zenith at or above [`HORIZON_CUTOFF_DEG`]).
pub fn bird_at_zenith(
    atm: &SiteAtmosphere,
    zenith_deg: f64,
    etr: f64,
) -> Result<Option<BirdComponents>> {
    if zenith_deg >= HORIZON_CUTOFF_DEG {
        return Ok(None);
    }
    let Some(am) = solar::relative_air_mass(zenith_deg) else {
        return Ok(None);
    };
    let amp = am * atm.pressure / solar::STANDARD_PRESSURE_HPA;

    let t_rayleigh = check_transmittance(
        "rayleigh",
        (-0.0903 * amp.powf(0.84) * (1.0 + amp - amp.powf(1.01))).exp(),
    )?;
    let xo = atm.ozone * am;
    let t_ozone = check_transmittance(
        "ozone",
        1.0 - 0.1611 * xo * (1.0 + 139.48 * xo).powf(-0.3034)
            - 0.002715 * xo / (1.0 + 0.044 * xo + 0.0003 * xo * xo),
    )?;
    let t_gases = check_transmittance("gases", (-0.0127 * amp.powf(0.26)).exp())?;
    let xw = atm.precipitable_water * am;
    let t_water = check_transmittance(
        "water",
        1.0 - 2.4959 * xw / ((1.0 + 79.034 * xw).powf(0.6828) + 6.385 * xw),
    )?;
    // broadband aerosol optical depth from the two spectral depths
    let taua = 0.2758 * atm.aod_380nm + 0.35 * atm.aod_500nm;
    let t_aerosol = check_transmittance(
        "aerosol",
        (-taua.powf(0.873) * (1.0 + taua - taua.powf(0.7088)) * am.powf(0.9108)).exp(),
    )?;
    let t_aa = check_transmittance(
        "aerosol_absorption",
        1.0 - 0.1 * (1.0 - am + am.powf(1.06)) * (1.0 - t_aerosol),
    )?;

    let ba = atm.forward_scatter;
    let atmospheric_albedo = 0.0685 + (1.0 - ba) * (1.0 - t_aerosol / t_aa);
    let cz = zenith_deg.to_radians().cos();

    let direct = 0.9662 * etr * t_aerosol * t_water * t_gases * t_ozone * t_rayleigh * cz;
    let scattered = etr * cz * 0.79 * t_ozone * t_gases * t_water * t_aa
        * (0.5 * (1.0 - t_rayleigh) + ba * (1.0 - t_aerosol / t_aa))
        / (1.0 - am + am.powf(1.02));
    let total = (direct + scattered) / (1.0 - atm.ground_albedo * atmospheric_albedo);

    Ok(Some(BirdComponents {
        direct,
        scattered,
        total,
        atmospheric_albedo,
        t_rayleigh,
        t_ozone,
        t_gases,
        t_water,
        t_aerosol,
        t_aerosol_absorption: t_aa,
    }))
}

/// Evaluates the Bird model for a site at an instant.
pub fn bird_components(atm: &SiteAtmosphere, t: Timestamp) -> Result<Option<BirdComponents>> {
    let pos = solar::sun_position(&atm.location, t)?;
    let etr = solar::extraterrestrial_irradiance(t)?;
    bird_at_zenith(atm, pos.zenith, etr)
}

/// Samples the clear-sky total on a regular grid. Night samples are
/// exactly 0 and valid.
pub fn clear_sky_series(
    atm: &SiteAtmosphere,
    start: Timestamp,
    step_s: u32,
    n: usize,
) -> Result<IrradianceSeries> {
    if n == 0 {
        return Err(Error::Validation("clear-sky series needs n >= 1".into()));
    }
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let t = start.offset(i as i64 * step_s as i64);
        let ghi = match bird_components(atm, t)? {
            Some(c) => c.total.max(0.0),
            None => 0.0,
        };
        values.push(ghi);
    }
    let valid = vec![true; n];
    IrradianceSeries::new(start, step_s, values, valid)
}

/// Per-sample clearness index with a night/invalid mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ClearnessSeries {
    start: Timestamp,
    step_s: u32,
    k: Vec<f64>,
    mask: Vec<bool>,
}

impl ClearnessSeries {
    pub fn new(start: Timestamp, step_s: u32, mut k: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        if step_s == 0 {
            return Err(Error::Validation("step must be > 0".into()));
        }
        if k.len() != mask.len() {
            return Err(Error::Validation("k and mask lengths differ".into()));
        }
        for (i, (v, &ok)) in k.iter_mut().zip(&mask).enumerate() {
            if ok {
                if !(v.is_finite() && (0.0..=K_MAX).contains(v)) {
                    return Err(Error::Validation(format!("k[{i}] = {v} outside [0, {K_MAX}]")));
                }
            } else {
                *v = K_PLACEHOLDER;
            }
        }
        Ok(ClearnessSeries { start, step_s, k, mask })
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    pub fn step_seconds(&self) -> u32 {
        self.step_s
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn timestamp_at(&self, index: usize) -> Timestamp {
        self.start.offset(index as i64 * self.step_s as i64)
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Copies the half-open index range out as a standalone series.
    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        if from >= to || to > self.len() {
            return Err(Error::Validation(format!(
                "slice {from}..{to} out of range for length {}",
                self.len()
            )));
        }
        ClearnessSeries::new(
            self.timestamp_at(from),
            self.step_s,
            self.k[from..to].to_vec(),
            self.mask[from..to].to_vec(),
        )
    }
}

/// Ratio of measured to clear-sky irradiance, clamped to [0, K_MAX].
///
/// Samples where the clear-sky value is below [`NIGHT_THRESHOLD_WM2`] or
/// the measurement is invalid are mask-invalid and carry the neutral
/// placeholder 1.0.
pub fn clearness_index(
    measured: &IrradianceSeries,
    clear: &IrradianceSeries,
) -> Result<ClearnessSeries> {
    if measured.start() != clear.start()
        || measured.step_seconds() != clear.step_seconds()
        || measured.len() != clear.len()
    {
        return Err(Error::Alignment(
            "measured and clear-sky series must share start, step and length".into(),
        ));
    }
    let n = measured.len();
    let mut k = Vec::with_capacity(n);
    let mut mask = Vec::with_capacity(n);
    for i in 0..n {
        let cs = clear.values()[i];
        if measured.valid()[i] && clear.valid()[i] && cs >= NIGHT_THRESHOLD_WM2 {
            k.push((measured.values()[i] / cs).clamp(0.0, K_MAX));
            mask.push(true);
        } else {
            k.push(K_PLACEHOLDER);
            mask.push(false);
        }
    }
    ClearnessSeries::new(measured.start(), measured.step_seconds(), k, mask)
}

/// Pearson correlation between measured and clear-sky irradiance over the
/// daytime samples of the listed calendar days.
pub fn clear_day_correlation(
    measured: &IrradianceSeries,
    clear: &IrradianceSeries,
    days: &[NaiveDate],
) -> Result<f64> {
    if days.is_empty() {
        return Err(Error::Validation("day list is empty".into()));
    }
    if measured.start() != clear.start()
        || measured.step_seconds() != clear.step_seconds()
        || measured.len() != clear.len()
    {
        return Err(Error::Alignment(
            "measured and clear-sky series must share start, step and length".into(),
        ));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..measured.len() {
        let cs = clear.values()[i];
        if measured.valid()[i] && clear.valid()[i] && cs >= NIGHT_THRESHOLD_WM2 {
            let date = measured.timestamp_at(i).date();
            if days.contains(&date) {
                xs.push(measured.values()[i]);
                ys.push(cs);
            }
        }
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} pooled daytime samples on the listed days (need >= 3)",
            xs.len()
        )));
    }
    Ok(pearson(&xs, &ys))
}

fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx.sqrt() * syy.sqrt())
}
