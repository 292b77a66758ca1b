//! Triple exponential smoothing (additive Holt-Winters) over clearness
//! index series: closed-form initialization, recursive update, m-step
//! forecasting and grid-search parameter fitting.
//!
//! Time convention: samples are indexed from 0; the seasonal slot for the
//! sample at index t is `t mod L`. Initialization computes the closed-form
//! level/trend/seasonal estimates from the history, then replays the
//! recursion over that same history, so the returned state is positioned
//! at the end of the history.

use rayon::prelude::*;

use crate::clear_sky::{self, ClearnessSeries, SiteAtmosphere, K_MAX};
use crate::error::{Error, Result};
use crate::series::IrradianceSeries;

/// How the initial seasonal indices are formed.
///
/// `Additive` subtracts the per-cycle mean (consistent with the additive
/// update equations and the default). `Ratio` divides by the per-cycle
/// mean; it is kept for comparison since some published descriptions use
/// the ratio form even with additive updates, where it biases the level
/// on a constant series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeasonalInit {
    Additive,
    Ratio,
}

impl SeasonalInit {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "additive" => Ok(SeasonalInit::Additive),
            "paper-ratio" | "ratio" => Ok(SeasonalInit::Ratio),
            other => Err(Error::Validation(format!(
                "unknown seasonal init mode {other:?} (expected 'additive' or 'paper-ratio')"
            ))),
        }
    }
}

/// Smoothing factors and season length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TesParams {
    alpha: f64,
    beta: f64,
    gamma: f64,
    season_length: usize,
    seasonal_init: SeasonalInit,
}

impl TesParams {
    pub fn new(
        alpha: f64,
        beta: f64,
        gamma: f64,
        season_length: usize,
        seasonal_init: SeasonalInit,
    ) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Validation(format!("{name} = {v} outside open interval (0, 1)")));
            }
        }
        if season_length < 2 {
            return Err(Error::Validation(format!("season length {season_length} < 2")));
        }
        Ok(TesParams { alpha, beta, gamma, season_length, seasonal_init })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn season_length(&self) -> usize {
        self.season_length
    }

    pub fn seasonal_init(&self) -> SeasonalInit {
        self.seasonal_init
    }
}

/// Closed-form initial level, trend and seasonal indices.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialEstimates {
    pub level: f64,
    pub trend: f64,
    pub seasonal: Vec<f64>,
}

/// Computes the closed-form initial estimates from a raw k sequence.
///
/// Level is the first sample; the trend is the two-cycle slope estimate
/// over the first 2L samples; seasonal indices average all N = floor(n/L)
/// complete cycles. Mask-invalid samples contribute the neutral
/// placeholder their series carries.
pub fn initial_estimates(k: &[f64], params: &TesParams) -> Result<InitialEstimates> {
    let len_l = params.season_length;
    if k.len() < 2 * len_l {
        return Err(Error::InsufficientData(format!(
            "history has {} samples; initialization needs a minimum of 2L = {} (two full seasons)",
            k.len(),
            2 * len_l
        )));
    }
    let level = k[0];
    let trend = (0..len_l).map(|i| (k[len_l + i] - k[i]) / len_l as f64).sum::<f64>() / len_l as f64;

    let cycles = k.len() / len_l;
    // base-point-shifted mean: exact on constant cycles, identical in
    // exact arithmetic to the plain mean
    let cycle_means: Vec<f64> = (0..cycles)
        .map(|j| {
            let cycle = &k[j * len_l..(j + 1) * len_l];
            cycle[0] + cycle.iter().map(|v| v - cycle[0]).sum::<f64>() / len_l as f64
        })
        .collect();

    let seasonal = (0..len_l)
        .map(|i| match params.seasonal_init {
            SeasonalInit::Additive => Ok((0..cycles)
                .map(|j| k[j * len_l + i] - cycle_means[j])
                .sum::<f64>()
                / cycles as f64),
            SeasonalInit::Ratio => {
                if cycle_means.contains(&0.0) {
                    return Err(Error::NumericDomain(
                        "degenerate cycle: zero mean forbids ratio seasonal init".into(),
                    ));
                }
                Ok((0..cycles).map(|j| k[j * len_l + i] / cycle_means[j]).sum::<f64>()
                    / cycles as f64)
            }
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(InitialEstimates { level, trend, seasonal })
}

/// Smoothed level, trend and seasonal cycle after consuming t samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TesState {
    level: f64,
    trend: f64,
    seasonal: Vec<f64>,
    /// Count of samples consumed; the last consumed sample has index t-1.
    t: usize,
}

impl TesState {
    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn trend(&self) -> f64 {
        self.trend
    }

    pub fn seasonal(&self) -> &[f64] {
        &self.seasonal
    }

    pub fn samples_consumed(&self) -> usize {
        self.t
    }

    /// One-step-ahead prediction from the current state.
    pub fn one_step_prediction(&self, params: &TesParams) -> f64 {
        let slot = self.t % params.season_length;
        self.level + self.trend + self.seasonal[slot]
    }

    /// Consumes one observation.
    ///
    /// For a mask-invalid observation the one-step prediction stands in
    /// for k_t: the level advances by the trend, the trend is unchanged
    /// and the seasonal slot is left untouched.
    pub fn observe(&mut self, k_t: f64, valid: bool, params: &TesParams) -> Result<()> {
        if !k_t.is_finite() {
            return Err(Error::NumericDomain(format!("non-finite observation {k_t}")));
        }
        let slot = self.t % params.season_length;
        if valid {
            let prev_level = self.level;
            let prev_trend = self.trend;
            let c_old = self.seasonal[slot];
            self.level = params.alpha * (k_t - c_old)
                + (1.0 - params.alpha) * (prev_level + prev_trend);
            self.trend =
                params.beta * (self.level - prev_level) + (1.0 - params.beta) * prev_trend;
            self.seasonal[slot] = params.gamma * (k_t - prev_level - prev_trend)
                + (1.0 - params.gamma) * c_old;
        } else {
            self.level += self.trend;
        }
        self.t += 1;
        Ok(())
    }

    /// Emits forecasts for horizons 1..=m_max.
    pub fn forecast(&self, m_max: usize, params: &TesParams) -> Forecast {
        let len_l = params.season_length;
        let origin = self.t - 1;
        let points = (1..=m_max)
            .map(|m| {
                let slot = (origin + m) % len_l;
                let raw = self.level + m as f64 * self.trend + self.seasonal[slot];
                ForecastPoint { steps_ahead: m, k_hat: raw.clamp(0.0, K_MAX), k_hat_raw: raw }
            })
            .collect();
        Forecast { origin_index: origin, points }
    }
}

/// One forecast horizon point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastPoint {
    pub steps_ahead: usize,
    /// Clamped to [0, K_MAX].
    pub k_hat: f64,
    /// Unclamped value, kept for diagnostics.
    pub k_hat_raw: f64,
}

/// Forecast fan from a single origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecast {
    /// Index of the last observed sample.
    pub origin_index: usize,
    pub points: Vec<ForecastPoint>,
}

impl Forecast {
    pub fn k_hat(&self, steps_ahead: usize) -> Option<f64> {
        self.points.iter().find(|p| p.steps_ahead == steps_ahead).map(|p| p.k_hat)
    }
}

/// Builds a state from a clearness history: closed-form estimates plus a
/// replay of the update recursion over the same history.
pub fn initialize(history: &ClearnessSeries, params: &TesParams) -> Result<TesState> {
    initialize_raw(history.k(), history.mask(), params)
}

/// As [`initialize`], over raw slices.
pub fn initialize_raw(k: &[f64], mask: &[bool], params: &TesParams) -> Result<TesState> {
    let est = initial_estimates(k, params)?;
    let mut state = TesState { level: est.level, trend: est.trend, seasonal: est.seasonal, t: 1 };
    for i in 1..k.len() {
        state.observe(k[i], mask[i], params)?;
    }
    Ok(state)
}

const GRID: [f64; 19] = [
    0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60, 0.65, 0.70, 0.75,
    0.80, 0.85, 0.90, 0.95,
];

/// One-step-ahead MAE of a parameter choice: initialize on the first 2L
/// samples, then score the trailing portion. Returns None when the
/// scoring region has no valid samples.
fn score_one_step(history: &ClearnessSeries, params: &TesParams) -> Result<Option<f64>> {
    let warmup = 2 * params.season_length;
    let est = initial_estimates(&history.k()[..warmup], params)?;
    let mut state = TesState { level: est.level, trend: est.trend, seasonal: est.seasonal, t: 1 };
    for i in 1..warmup {
        state.observe(history.k()[i], history.mask()[i], params)?;
    }
    let mut abs_sum = 0.0;
    let mut count = 0usize;
    for i in warmup..history.len() {
        if history.mask()[i] {
            let pred = state.one_step_prediction(params).clamp(0.0, K_MAX);
            abs_sum += (pred - history.k()[i]).abs();
            count += 1;
        }
        state.observe(history.k()[i], history.mask()[i], params)?;
    }
    Ok((count > 0).then(|| abs_sum / count as f64))
}

/// Deterministic grid search over α, β, γ ∈ {0.05, 0.10, ..., 0.95}
/// minimizing one-step-ahead MAE; ties break to the lowest α, then β,
/// then γ.
pub fn fit(history: &ClearnessSeries, season_length: usize, mode: SeasonalInit) -> Result<TesParams> {
    if history.len() < 3 * season_length {
        return Err(Error::InsufficientData(format!(
            "fitting needs at least 3L = {} samples, got {}",
            3 * season_length,
            history.len()
        )));
    }
    let scored: Vec<(TesParams, Option<f64>)> = GRID
        .par_iter()
        .map(|&alpha| -> Result<Vec<(TesParams, Option<f64>)>> {
            let mut out = Vec::with_capacity(GRID.len() * GRID.len());
            for &beta in &GRID {
                for &gamma in &GRID {
                    let params = TesParams::new(alpha, beta, gamma, season_length, mode)?;
                    out.push((params, score_one_step(history, &params)?));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut best: Option<(TesParams, f64)> = None;
    for (params, score) in scored {
        if let Some(mae) = score {
            let better = match &best {
                Some((_, b)) => mae < *b,
                None => true,
            };
            if better {
                best = Some((params, mae));
            }
        }
    }
    best.map(|(p, _)| p).ok_or_else(|| {
        Error::InsufficientData("no valid samples in the fitting score region".into())
    })
}

/// End-to-end forecasting: clear-sky computation, clearness index,
/// training over the trailing window and k forecasting.
///
/// Forecast irradiance is recoverable as k̂ times the clear-sky value at
/// each future instant.
pub fn run_pipeline(
    measured: &IrradianceSeries,
    atm: &SiteAtmosphere,
    train_len: usize,
    m_max: usize,
    params: &TesParams,
) -> Result<Forecast> {
    if train_len < 2 * params.season_length {
        return Err(Error::InsufficientData(format!(
            "training window {train_len} below the 2L minimum of {}",
            2 * params.season_length
        )));
    }
    if measured.len() < train_len {
        return Err(Error::InsufficientData(format!(
            "series has {} samples, training needs {train_len}",
            measured.len()
        )));
    }
    let window = measured.slice(measured.len() - train_len, measured.len())?;
    let clear = clear_sky::clear_sky_series(atm, window.start(), window.step_seconds(), window.len())?;
    let k = clear_sky::clearness_index(&window, &clear)?;
    if k.valid_count() == 0 {
        return Err(Error::InsufficientData(
            "training window contains no valid daytime samples".into(),
        ));
    }
    let state = initialize(&k, params)?;
    Ok(state.forecast(m_max, params))
}
