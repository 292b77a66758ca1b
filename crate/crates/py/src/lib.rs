//! Python bindings for the solarcast forecasting library.
//!
//! Series cross the boundary as plain lists (values plus a validity
//! mask) with an ISO 8601 start timestamp and a step in seconds; reports
//! come back as JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use solarcast::clear_sky::{self, SiteAtmosphere};
use solarcast::eval::{self, ExperimentConfig, Method};
use solarcast::synth::{self, SynthConfig};
use solarcast::tes::{self, SeasonalInit, TesParams, TesState};
use solarcast::{ClearnessSeries, Error, GeoLocation, IrradianceSeries, Timestamp};

fn to_py(e: Error) -> PyErr {
    match e.exit_code() {
        1 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_ts(text: &str) -> PyResult<Timestamp> {
    Timestamp::parse(text).map_err(to_py)
}

fn irradiance(start: &str, step_s: u32, values: Vec<f64>, valid: Vec<bool>) -> PyResult<IrradianceSeries> {
    IrradianceSeries::new(parse_ts(start)?, step_s, values, valid).map_err(to_py)
}

fn clearness(start: &str, step_s: u32, k: Vec<f64>, mask: Vec<bool>) -> PyResult<ClearnessSeries> {
    ClearnessSeries::new(parse_ts(start)?, step_s, k, mask).map_err(to_py)
}

/// Site location plus the Bird atmospheric parameter set.
#[pyclass(name = "SiteAtmosphere", skip_from_py_object)]
#[derive(Clone)]
struct PySiteAtmosphere {
    inner: SiteAtmosphere,
}

#[pymethods]
impl PySiteAtmosphere {
    #[new]
    #[pyo3(signature = (latitude, longitude, elevation_m=0.0, ozone_atm_cm=0.3,
        water_atm_cm=1.5, aod_380nm=0.15, aod_500nm=0.1, albedo=0.2,
        pressure_hpa=1013.25, forward_scatter=0.84))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        latitude: f64,
        longitude: f64,
        elevation_m: f64,
        ozone_atm_cm: f64,
        water_atm_cm: f64,
        aod_380nm: f64,
        aod_500nm: f64,
        albedo: f64,
        pressure_hpa: f64,
        forward_scatter: f64,
    ) -> PyResult<Self> {
        let loc = GeoLocation::new(latitude, longitude, elevation_m).map_err(to_py)?;
        let inner = SiteAtmosphere::new(
            loc,
            ozone_atm_cm,
            water_atm_cm,
            aod_380nm,
            aod_500nm,
            albedo,
            pressure_hpa,
            forward_scatter,
        )
        .map_err(to_py)?;
        Ok(PySiteAtmosphere { inner })
    }

    /// Site with the reference mid-latitude atmosphere.
    #[staticmethod]
    #[pyo3(signature = (latitude, longitude, elevation_m=0.0))]
    fn reference(latitude: f64, longitude: f64, elevation_m: f64) -> PyResult<Self> {
        let loc = GeoLocation::new(latitude, longitude, elevation_m).map_err(to_py)?;
        Ok(PySiteAtmosphere { inner: SiteAtmosphere::reference(loc) })
    }

    fn __repr__(&self) -> String {
        let loc = self.inner.location();
        format!(
            "SiteAtmosphere(latitude={}, longitude={}, elevation_m={})",
            loc.latitude(),
            loc.longitude(),
            loc.elevation()
        )
    }
}

/// Smoothing factors and season length.
#[pyclass(name = "TesParams", skip_from_py_object)]
#[derive(Clone)]
struct PyTesParams {
    inner: TesParams,
}

#[pymethods]
impl PyTesParams {
    #[new]
    #[pyo3(signature = (alpha, beta, gamma, season_length, seasonal_init="additive"))]
    fn new(
        alpha: f64,
        beta: f64,
        gamma: f64,
        season_length: usize,
        seasonal_init: &str,
    ) -> PyResult<Self> {
        let mode = SeasonalInit::parse(seasonal_init).map_err(to_py)?;
        let inner = TesParams::new(alpha, beta, gamma, season_length, mode).map_err(to_py)?;
        Ok(PyTesParams { inner })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    #[getter]
    fn season_length(&self) -> usize {
        self.inner.season_length()
    }

    fn __repr__(&self) -> String {
        format!(
            "TesParams(alpha={}, beta={}, gamma={}, season_length={})",
            self.inner.alpha(),
            self.inner.beta(),
            self.inner.gamma(),
            self.inner.season_length()
        )
    }
}

/// Smoothed level, trend and seasonal cycle; carries its parameters.
#[pyclass(name = "TesState")]
struct PyTesState {
    state: TesState,
    params: TesParams,
}

#[pymethods]
impl PyTesState {
    #[getter]
    fn level(&self) -> f64 {
        self.state.level()
    }

    #[getter]
    fn trend(&self) -> f64 {
        self.state.trend()
    }

    #[getter]
    fn seasonal(&self) -> Vec<f64> {
        self.state.seasonal().to_vec()
    }

    #[getter]
    fn samples_consumed(&self) -> usize {
        self.state.samples_consumed()
    }

    /// Consumes one observation; invalid samples advance by the trend.
    #[pyo3(signature = (k, valid=true))]
    fn observe(&mut self, k: f64, valid: bool) -> PyResult<()> {
        self.state.observe(k, valid, &self.params).map_err(to_py)
    }

    /// Clamped forecasts for horizons 1..=m_max.
    fn forecast(&self, m_max: usize) -> Vec<f64> {
        self.state.forecast(m_max, &self.params).points.iter().map(|p| p.k_hat).collect()
    }
}

/// Builds a state from a clearness history (closed-form initialization
/// plus a replay of the recursion).
#[pyfunction]
#[pyo3(signature = (k, mask, params))]
fn initialize(k: Vec<f64>, mask: Vec<bool>, params: &PyTesParams) -> PyResult<PyTesState> {
    let state = tes::initialize_raw(&k, &mask, &params.inner).map_err(to_py)?;
    Ok(PyTesState { state, params: params.inner })
}

/// Deterministic grid search minimizing one-step-ahead MAE.
#[pyfunction]
#[pyo3(signature = (k, mask, season_length, seasonal_init="additive"))]
fn fit(k: Vec<f64>, mask: Vec<bool>, season_length: usize, seasonal_init: &str) -> PyResult<PyTesParams> {
    let mode = SeasonalInit::parse(seasonal_init).map_err(to_py)?;
    let history = clearness("1970-01-01T00:00:00Z", 300, k, mask)?;
    let inner = tes::fit(&history, season_length, mode).map_err(to_py)?;
    Ok(PyTesParams { inner })
}

/// Clear-sky irradiance at each step, W/m² (0 at night).
#[pyfunction]
fn clear_sky_series(site: &PySiteAtmosphere, start: &str, step_s: u32, n: usize) -> PyResult<Vec<f64>> {
    let s = clear_sky::clear_sky_series(&site.inner, parse_ts(start)?, step_s, n).map_err(to_py)?;
    Ok(s.values().to_vec())
}

/// Clearness index of a measured series: returns (k, mask) where night
/// and invalid samples are masked out with a neutral placeholder.
#[pyfunction]
fn clearness_index(
    site: &PySiteAtmosphere,
    start: &str,
    step_s: u32,
    values: Vec<f64>,
    valid: Vec<bool>,
) -> PyResult<(Vec<f64>, Vec<bool>)> {
    let measured = irradiance(start, step_s, values, valid)?;
    let clear = clear_sky::clear_sky_series(&site.inner, measured.start(), step_s, measured.len())
        .map_err(to_py)?;
    let k = clear_sky::clearness_index(&measured, &clear).map_err(to_py)?;
    Ok((k.k().to_vec(), k.mask().to_vec()))
}

/// Repeats the last valid clearness index for every lead.
#[pyfunction]
fn persistence_forecast(k: Vec<f64>, mask: Vec<bool>, m_max: usize) -> PyResult<Vec<f64>> {
    let history = clearness("1970-01-01T00:00:00Z", 300, k, mask)?;
    let f = solarcast::baselines::persistence_forecast(&history, m_max).map_err(to_py)?;
    Ok(f.points.iter().map(|p| p.k_hat).collect())
}

/// Mean over the trailing window, repeated for every lead.
#[pyfunction]
fn average_forecast(k: Vec<f64>, mask: Vec<bool>, window: usize, m_max: usize) -> PyResult<Vec<f64>> {
    let history = clearness("1970-01-01T00:00:00Z", 300, k, mask)?;
    let f = solarcast::baselines::average_forecast(&history, window, m_max).map_err(to_py)?;
    Ok(f.points.iter().map(|p| p.k_hat).collect())
}

/// End-to-end pipeline: clear-sky, clearness index, training over the
/// trailing window, k forecasting. Returns clamped k̂ for 1..=m_max.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn run_pipeline(
    site: &PySiteAtmosphere,
    start: &str,
    step_s: u32,
    values: Vec<f64>,
    valid: Vec<bool>,
    train_len: usize,
    m_max: usize,
    params: &PyTesParams,
) -> PyResult<Vec<f64>> {
    let measured = irradiance(start, step_s, values, valid)?;
    let f = tes::run_pipeline(&measured, &site.inner, train_len, m_max, &params.inner)
        .map_err(to_py)?;
    Ok(f.points.iter().map(|p| p.k_hat).collect())
}

/// One synthetic year of irradiance under an AR(1) cloud process.
/// Returns (start, values, valid).
#[pyfunction]
#[pyo3(signature = (site, year, seed, step_s=300, cloud_persistence=0.7, cloud_depth=0.8))]
fn synthesize_year(
    site: &PySiteAtmosphere,
    year: i32,
    seed: u64,
    step_s: u32,
    cloud_persistence: f64,
    cloud_depth: f64,
) -> PyResult<(String, Vec<f64>, Vec<bool>)> {
    let cfg = SynthConfig { site: site.inner, year, step_s, cloud_persistence, cloud_depth, seed };
    let s = synth::synthesize_year(&cfg).map_err(to_py)?;
    Ok((s.start().to_string(), s.values().to_vec(), s.valid().to_vec()))
}

fn harness_config(
    train_len: usize,
    lead_steps: Vec<usize>,
    n_experiments: usize,
    seed: u64,
    methods: Vec<Method>,
    params: &PyTesParams,
    average_window: Option<usize>,
) -> ExperimentConfig {
    ExperimentConfig {
        train_len,
        lead_steps,
        n_experiments,
        seed,
        methods,
        tes_params: params.inner,
        average_window,
    }
}

/// Seeded multi-method benchmark on a clearness series; JSON report.
#[pyfunction]
#[pyo3(signature = (k, mask, step_s, train_len, lead_steps, n_experiments, seed, params, average_window=None))]
#[allow(clippy::too_many_arguments)]
fn benchmark(
    k: Vec<f64>,
    mask: Vec<bool>,
    step_s: u32,
    train_len: usize,
    lead_steps: Vec<usize>,
    n_experiments: usize,
    seed: u64,
    params: &PyTesParams,
    average_window: Option<usize>,
) -> PyResult<String> {
    let data = clearness("1970-01-01T00:00:00Z", step_s, k, mask)?;
    let methods = vec![Method::Tes, Method::Persistence, Method::Average];
    let cfg = harness_config(train_len, lead_steps, n_experiments, seed, methods, params, average_window);
    Ok(eval::benchmark(&data, &cfg).map_err(to_py)?.to_json())
}

/// Seeded lead-time study (forecaster only); JSON report.
#[pyfunction]
#[pyo3(signature = (k, mask, step_s, train_len, lead_steps, n_experiments, seed, params))]
#[allow(clippy::too_many_arguments)]
fn leadtime_study(
    k: Vec<f64>,
    mask: Vec<bool>,
    step_s: u32,
    train_len: usize,
    lead_steps: Vec<usize>,
    n_experiments: usize,
    seed: u64,
    params: &PyTesParams,
) -> PyResult<String> {
    let data = clearness("1970-01-01T00:00:00Z", step_s, k, mask)?;
    let cfg = harness_config(train_len, lead_steps, n_experiments, seed, vec![Method::Tes], params, None);
    Ok(eval::leadtime_study(&data, &cfg).map_err(to_py)?.to_json())
}

#[pymodule]
fn solarcast_native(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySiteAtmosphere>()?;
    m.add_class::<PyTesParams>()?;
    m.add_class::<PyTesState>()?;
    m.add_function(wrap_pyfunction!(initialize, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(clear_sky_series, m)?)?;
    m.add_function(wrap_pyfunction!(clearness_index, m)?)?;
    m.add_function(wrap_pyfunction!(persistence_forecast, m)?)?;
    m.add_function(wrap_pyfunction!(average_forecast, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_year, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark, m)?)?;
    m.add_function(wrap_pyfunction!(leadtime_study, m)?)?;
    m.add("NIGHT_THRESHOLD_WM2", clear_sky::NIGHT_THRESHOLD_WM2)?;
    m.add("K_MAX", clear_sky::K_MAX)?;
    Ok(())
}
