//! Error metrics and the randomized rolling-origin evaluation protocols:
//! the lead-time box-plot study and the multi-method benchmark.
//!
//! Experiment origins are drawn uniformly at random (seeded) from the
//! admissible positions; inadmissible draws are rejected and redrawn, and
//! the redraw count is reported. Reports are byte-identical across runs
//! with the same seed, including under parallel execution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

use crate::baselines;
use crate::clear_sky::ClearnessSeries;
use crate::error::{Error, Result};
use crate::tes::{self, TesParams};

/// Forecasting methods the harness can score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Tes,
    Persistence,
    Average,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Tes => "tes",
            Method::Persistence => "persistence",
            Method::Average => "average",
        }
    }
}

/// Protocol configuration for one harness run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub train_len: usize,
    /// Lead times in steps, strictly increasing.
    pub lead_steps: Vec<usize>,
    pub n_experiments: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub tes_params: TesParams,
    /// Trailing window for the average baseline; defaults to the full
    /// training history.
    pub average_window: Option<usize>,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.lead_steps.is_empty() {
            return Err(Error::Config("lead_steps must be non-empty".into()));
        }
        if !self.lead_steps.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("lead_steps must be strictly increasing".into()));
        }
        if self.n_experiments == 0 {
            return Err(Error::Config("n_experiments must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("methods must be non-empty".into()));
        }
        if self.methods.contains(&Method::Tes)
            && self.train_len < 2 * self.tes_params.season_length()
        {
            return Err(Error::Config(format!(
                "train_len {} below the 2L minimum of {}",
                self.train_len,
                2 * self.tes_params.season_length()
            )));
        }
        Ok(())
    }
}

/// Five-number summary plus mean. Quartiles use linear interpolation
/// (inclusive convention).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxplotStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

pub fn boxplot_stats(values: &[f64]) -> Result<BoxplotStats> {
    if values.is_empty() {
        return Err(Error::InsufficientData("boxplot of an empty list".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    Ok(BoxplotStats {
        min: sorted[0],
        q1: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q3: quantile(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
        mean: values.iter().sum::<f64>() / values.len() as f64,
    })
}

/// Mean absolute error over the valid pairs.
pub fn mae(predicted: &[f64], actual: &[f64], mask: &[bool]) -> Result<f64> {
    if predicted.len() != actual.len() || predicted.len() != mask.len() {
        return Err(Error::Alignment("mae inputs must have equal lengths".into()));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for ((&p, &a), &ok) in predicted.iter().zip(actual).zip(mask) {
        if ok {
            sum += (p - a).abs();
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::InsufficientData("no valid pairs for MAE".into()));
    }
    Ok(sum / count as f64)
}

/// Config echo embedded in every report so artifacts are self-describing.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub train_len: usize,
    pub lead_steps: Vec<usize>,
    pub step_seconds: u32,
    pub n_experiments: usize,
    pub seed: u64,
    pub methods: Vec<String>,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub season_length: usize,
    pub seasonal_init: String,
    pub average_window: usize,
    pub quartile_convention: String,
}

/// Per-lead error distribution and summary for one method.
#[derive(Debug, Clone, Serialize)]
pub struct LeadReport {
    pub lead_steps: usize,
    pub lead_minutes: f64,
    pub mae: Vec<f64>,
    pub summary: BoxplotStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodReport {
    pub per_lead: Vec<LeadReport>,
    /// Mean MAE pooled over all lead times and experiments (the single
    /// aggregate per method).
    pub pooled_mean: f64,
}

/// Full output of one harness run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: ConfigEcho,
    pub redraws: usize,
    pub per_method: BTreeMap<String, MethodReport>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Flat CSV: `method,lead_minutes,experiment,mae`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,lead_minutes,experiment,mae\n");
        for (method, rep) in &self.per_method {
            for lead in &rep.per_lead {
                for (i, v) in lead.mae.iter().enumerate() {
                    out.push_str(&format!("{method},{},{i},{v}\n", lead.lead_minutes));
                }
            }
        }
        out
    }
}

fn echo(cfg: &ExperimentConfig, step_seconds: u32) -> ConfigEcho {
    ConfigEcho {
        train_len: cfg.train_len,
        lead_steps: cfg.lead_steps.clone(),
        step_seconds,
        n_experiments: cfg.n_experiments,
        seed: cfg.seed,
        methods: cfg.methods.iter().map(|m| m.name().to_string()).collect(),
        alpha: cfg.tes_params.alpha(),
        beta: cfg.tes_params.beta(),
        gamma: cfg.tes_params.gamma(),
        season_length: cfg.tes_params.season_length(),
        seasonal_init: match cfg.tes_params.seasonal_init() {
            tes::SeasonalInit::Additive => "additive".into(),
            tes::SeasonalInit::Ratio => "paper-ratio".into(),
        },
        average_window: cfg.average_window.unwrap_or(cfg.train_len),
        quartile_convention: "linear interpolation (inclusive)".into(),
    }
}

/// Draws the experiment origins (index of the last training sample per
/// experiment) with rejection-and-redraw. Every drawn experiment has its
/// training window inside the data, at least one valid training sample
/// and all forecast targets mask-valid.
fn draw_origins(data: &ClearnessSeries, cfg: &ExperimentConfig) -> Result<(Vec<usize>, usize)> {
    let max_lead = *cfg.lead_steps.last().unwrap();
    let n = data.len();
    if cfg.train_len + max_lead > n {
        return Err(Error::Config(format!(
            "data has {n} samples; need at least train_len + max lead = {}",
            cfg.train_len + max_lead
        )));
    }
    let lo = cfg.train_len - 1;
    let hi = n - 1 - max_lead;

    // prefix counts of valid samples for O(1) window checks
    let mut prefix = vec![0usize; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + data.mask()[i] as usize;
    }
    // the average baseline needs a valid sample inside its own trailing
    // window, which may be shorter than the full training history
    let avg_window = if cfg.methods.contains(&Method::Average) {
        cfg.average_window.unwrap_or(cfg.train_len).min(cfg.train_len)
    } else {
        cfg.train_len
    };
    let admissible = |o: usize| {
        let window_valid = prefix[o + 1] - prefix[o + 1 - cfg.train_len];
        let avg_valid = prefix[o + 1] - prefix[o + 1 - avg_window];
        window_valid > 0 && avg_valid > 0 && cfg.lead_steps.iter().all(|&m| data.mask()[o + m])
    };

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut origins = Vec::with_capacity(cfg.n_experiments);
    let mut redraws = 0usize;
    let budget = 1000usize.saturating_mul(cfg.n_experiments).max(100_000);
    let mut attempts = 0usize;
    while origins.len() < cfg.n_experiments {
        if attempts > budget {
            return Err(Error::Config(
                "no admissible experiment origins found within the redraw budget".into(),
            ));
        }
        attempts += 1;
        let o = rng.gen_range(lo..=hi);
        if admissible(o) {
            origins.push(o);
        } else {
            redraws += 1;
        }
    }
    Ok((origins, redraws))
}

/// Absolute forecast errors for one experiment: per method, per lead.
fn run_one(
    data: &ClearnessSeries,
    cfg: &ExperimentConfig,
    origin: usize,
) -> Result<Vec<Vec<f64>>> {
    let max_lead = *cfg.lead_steps.last().unwrap();
    let window = data.slice(origin + 1 - cfg.train_len, origin + 1)?;
    let avg_window = cfg.average_window.unwrap_or(cfg.train_len);
    cfg.methods
        .iter()
        .map(|method| {
            let forecast = match method {
                Method::Tes => {
                    let state = tes::initialize(&window, &cfg.tes_params)?;
                    state.forecast(max_lead, &cfg.tes_params)
                }
                Method::Persistence => baselines::persistence_forecast(&window, max_lead)?,
                Method::Average => baselines::average_forecast(&window, avg_window, max_lead)?,
            };
            cfg.lead_steps
                .iter()
                .map(|&m| {
                    let k_hat = forecast.k_hat(m).expect("lead within forecast fan");
                    Ok((k_hat - data.k()[origin + m]).abs())
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect()
}

fn run_experiments(data: &ClearnessSeries, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let (origins, redraws) = draw_origins(data, cfg)?;

    // experiments are independent; results are assembled in experiment
    // order so parallelism never changes output bytes
    let results: Vec<Vec<Vec<f64>>> = origins
        .par_iter()
        .map(|&o| run_one(data, cfg, o))
        .collect::<Result<Vec<_>>>()?;

    let step_seconds = data.step_seconds();
    let mut per_method = BTreeMap::new();
    for (mi, method) in cfg.methods.iter().enumerate() {
        let mut per_lead = Vec::with_capacity(cfg.lead_steps.len());
        let mut pooled = Vec::new();
        for (li, &m) in cfg.lead_steps.iter().enumerate() {
            let errors: Vec<f64> = results.iter().map(|r| r[mi][li]).collect();
            pooled.extend_from_slice(&errors);
            per_lead.push(LeadReport {
                lead_steps: m,
                lead_minutes: m as f64 * step_seconds as f64 / 60.0,
                summary: boxplot_stats(&errors)?,
                mae: errors,
            });
        }
        let pooled_mean = pooled.iter().sum::<f64>() / pooled.len() as f64;
        per_method.insert(method.name().to_string(), MethodReport { per_lead, pooled_mean });
    }

    Ok(ExperimentReport { config: echo(cfg, step_seconds), redraws, per_method })
}

/// The lead-time study: TES only, full per-lead error distributions for
/// box-plot emission.
pub fn leadtime_study(data: &ClearnessSeries, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if cfg.methods != [Method::Tes] {
        return Err(Error::Config("leadtime_study runs the tes method only".into()));
    }
    run_experiments(data, cfg)
}

/// The multi-method benchmark: all methods scored on identical windows
/// and identical targets (paired design).
pub fn benchmark(data: &ClearnessSeries, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    for required in [Method::Tes, Method::Persistence, Method::Average] {
        if !cfg.methods.contains(&required) {
            return Err(Error::Config(format!(
                "benchmark requires method {:?}",
                required.name()
            )));
        }
    }
    run_experiments(data, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Timestamp;
    use crate::tes::SeasonalInit;

    fn kseries(k: Vec<f64>, mask: Vec<bool>) -> ClearnessSeries {
        ClearnessSeries::new(Timestamp::parse("2015-06-01T00:00:00Z").unwrap(), 300, k, mask).unwrap()
    }

    fn config(train_len: usize, methods: Vec<Method>, season_length: usize) -> ExperimentConfig {
        ExperimentConfig {
            train_len,
            lead_steps: vec![1, 2, 3, 4],
            n_experiments: 10,
            seed: 1,
            methods,
            tes_params: TesParams::new(0.5, 0.05, 0.05, season_length, SeasonalInit::Additive)
                .unwrap(),
            average_window: None,
        }
    }

    #[test]
    fn mae_identity_and_single_pair() {
        assert_eq!(mae(&[0.5, 0.7], &[0.5, 0.7], &[true, true]).unwrap(), 0.0);
        let m = mae(&[0.5], &[0.3], &[true]).unwrap();
        assert!((m - 0.2).abs() < 1e-12);
    }

    #[test]
    fn mae_respects_mask_and_rejects_empty() {
        let m = mae(&[1.0, 0.5], &[0.0, 0.3], &[false, true]).unwrap();
        assert!((m - 0.2).abs() < 1e-12);
        assert!(matches!(mae(&[1.0], &[0.0], &[false]), Err(Error::InsufficientData(_))));
        assert!(matches!(mae(&[1.0], &[0.0, 1.0], &[false, true]), Err(Error::Alignment(_))));
    }

    #[test]
    fn mae_matches_direct_sum_oracle() {
        let pred: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let act: Vec<f64> = (0..50).map(|i| (i as f64 * 0.11).cos().abs()).collect();
        let mask: Vec<bool> = (0..50).map(|i| i % 7 != 0).collect();
        let got = mae(&pred, &act, &mask).unwrap();
        let mut sum = 0.0;
        let mut n = 0;
        for i in 0..50 {
            if mask[i] {
                sum += (pred[i] - act[i]).abs();
                n += 1;
            }
        }
        assert!((got - sum / n as f64).abs() < 1e-12);
    }

    #[test]
    fn boxplot_symmetric_and_singleton() {
        let s = boxplot_stats(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!((s.min, s.q1, s.median, s.q3, s.max, s.mean), (1.0, 2.0, 3.0, 4.0, 5.0, 3.0));
        let c = boxplot_stats(&[7.5]).unwrap();
        assert_eq!((c.min, c.q1, c.median, c.q3, c.max, c.mean), (7.5, 7.5, 7.5, 7.5, 7.5, 7.5));
        assert!(boxplot_stats(&[]).is_err());
    }

    #[test]
    fn boxplot_matches_quantile_oracle() {
        let vals: Vec<f64> = (0..37).map(|i| ((i * 13) % 29) as f64 / 7.0).collect();
        let s = boxplot_stats(&vals).unwrap();
        let mut sorted = vals.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        // independent linear-interpolation quantile using the same rule
        let oracle = |q: f64| {
            let pos = q * (sorted.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let frac = pos - lo as f64;
            if lo + 1 < sorted.len() {
                sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
            } else {
                sorted[lo]
            }
        };
        assert!((s.q1 - oracle(0.25)).abs() < 1e-12);
        assert!((s.median - oracle(0.5)).abs() < 1e-12);
        assert!((s.q3 - oracle(0.75)).abs() < 1e-12);
    }

    #[test]
    fn constant_series_all_methods_zero_error() {
        let n = 200;
        let data = kseries(vec![0.8; n], vec![true; n]);
        let cfg = config(40, vec![Method::Tes, Method::Persistence, Method::Average], 10);
        let report = benchmark(&data, &cfg).unwrap();
        for rep in report.per_method.values() {
            assert_eq!(rep.pooled_mean, 0.0);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let k: Vec<f64> = (0..300).map(|i| 0.5 + 0.4 * (i as f64 * 0.3).sin()).collect();
        let data = kseries(k, vec![true; 300]);
        let cfg = config(40, vec![Method::Tes], 10);
        let a = leadtime_study(&data, &cfg).unwrap().to_json();
        let b = leadtime_study(&data, &cfg).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn experiment_counts_always_met_despite_redraws() {
        // every 7th sample invalid: plenty of rejections, but the count
        // of recorded experiments must still equal n_experiments
        let n = 400;
        let mask: Vec<bool> = (0..n).map(|i| i % 7 != 0).collect();
        let k: Vec<f64> = (0..n).map(|i| if mask[i] { 0.5 } else { 1.0 }).collect();
        let data = kseries(k, mask);
        let cfg = config(40, vec![Method::Tes], 10);
        let report = leadtime_study(&data, &cfg).unwrap();
        for lead in &report.per_method["tes"].per_lead {
            assert_eq!(lead.mae.len(), cfg.n_experiments);
        }
        assert!(report.redraws > 0);
    }

    #[test]
    fn impossible_configs_rejected() {
        let data = kseries(vec![0.5; 50], vec![true; 50]);
        let cfg = config(60, vec![Method::Tes], 10);
        assert!(matches!(leadtime_study(&data, &cfg), Err(Error::Config(_))));

        // all-invalid targets: admissibility can never hold
        let dead = kseries(vec![1.0; 100], vec![false; 100]);
        let cfg = config(30, vec![Method::Tes], 10);
        assert!(matches!(leadtime_study(&dead, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn leadtime_study_rejects_extra_methods() {
        let data = kseries(vec![0.5; 100], vec![true; 100]);
        let cfg = config(30, vec![Method::Tes, Method::Persistence], 10);
        assert!(matches!(leadtime_study(&data, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn csv_shape() {
        let data = kseries(vec![0.8; 200], vec![true; 200]);
        let cfg = config(40, vec![Method::Tes], 10);
        let report = leadtime_study(&data, &cfg).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "method,lead_minutes,experiment,mae");
        assert_eq!(lines.len(), 1 + 4 * 10);
        assert!(lines[1].starts_with("tes,5,0,"));
    }
}
