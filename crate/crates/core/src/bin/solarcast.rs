use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use solarcast::clear_sky::{self, SiteAtmosphere};
use solarcast::error::{Error, Result};
use solarcast::eval::{self, ExperimentConfig, Method};
use solarcast::series::{self, IrradianceSeries, Timestamp};
use solarcast::synth::{self, SynthConfig};
use solarcast::tes::{self, SeasonalInit, TesParams};

#[derive(Parser)]
#[command(name = "solarcast", version, about = "Clearness-index solar irradiance forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a clear-sky irradiance CSV for a site and time span
    Clearsky(ClearskyArgs),
    /// Compute the clearness-index series of a measured CSV
    Kindex(KindexArgs),
    /// Forecast future clearness indices and irradiance from measured data
    Forecast(ForecastArgs),
    /// Paired benchmark of tes, persistence and average forecasters
    Benchmark(HarnessArgs),
    /// Lead-time error study of the tes forecaster
    LeadtimeStudy(HarnessArgs),
    /// Generate a synthetic year of irradiance data
    Synth(SynthArgs),
}

#[derive(Args)]
struct ClearskyArgs {
    /// Site/atmosphere config file (key=value lines)
    #[arg(long)]
    site: PathBuf,
    /// First timestamp, ISO-8601 UTC (e.g. 2015-06-01T00:00:00Z)
    #[arg(long)]
    start: String,
    /// Span to cover, in hours
    #[arg(long)]
    hours: u32,
    /// Sample step in seconds
    #[arg(long, default_value_t = 300)]
    step: u32,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KindexArgs {
    /// Measured irradiance CSV
    #[arg(long)]
    measured: PathBuf,
    /// Site/atmosphere config file
    #[arg(long)]
    site: PathBuf,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ForecastArgs {
    /// Measured irradiance CSV
    #[arg(long)]
    measured: PathBuf,
    /// Site/atmosphere config file
    #[arg(long)]
    site: PathBuf,
    /// Training window: sample count or a multiple of the season
    /// length ("1152" or "4L")
    #[arg(long)]
    train: String,
    /// Forecast horizon: steps or minutes ("4" or "20m")
    #[arg(long)]
    lead: String,
    /// Season length in samples (default: one day at the data's step)
    #[arg(long)]
    season_length: Option<usize>,
    /// Grid-search the smoothing factors on the training window
    #[arg(long, conflicts_with_all = ["alpha", "beta", "gamma"])]
    fit: bool,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
    /// Seasonal initialization: additive | paper-ratio
    #[arg(long, default_value = "additive")]
    seasonal_init: String,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HarnessArgs {
    /// Measured irradiance CSV
    #[arg(long)]
    measured: PathBuf,
    /// Site/atmosphere config file
    #[arg(long)]
    site: PathBuf,
    /// Training window: sample count or a multiple of the season length
    #[arg(long, default_value = "4L")]
    train: String,
    /// Comma-separated lead times, each steps or minutes
    /// (e.g. "5m,10m,15m,20m")
    #[arg(long, default_value = "5m,10m,15m,20m")]
    leads: String,
    #[arg(long, default_value_t = 100)]
    experiments: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    season_length: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    beta: f64,
    #[arg(long, default_value_t = 0.05)]
    gamma: f64,
    /// Seasonal initialization: additive | paper-ratio
    #[arg(long, default_value = "additive")]
    seasonal_init: String,
    /// Trailing window of the average baseline (default: full training
    /// history)
    #[arg(long)]
    average_window: Option<usize>,
    /// JSON report path
    #[arg(long)]
    json: PathBuf,
    /// Flat CSV report path
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Site/atmosphere config file
    #[arg(long)]
    site: PathBuf,
    #[arg(long)]
    year: i32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum cloud attenuation in [0, 1]; 0 gives a perfectly clear year
    #[arg(long, default_value_t = 0.8)]
    cloud_depth: f64,
    /// AR(1) coefficient of the cloud state, in (0, 1)
    #[arg(long, default_value_t = 0.7)]
    cloud_persistence: f64,
    /// Sample step in seconds
    #[arg(long, default_value_t = 300)]
    step: u32,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { 0 } else { 1 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Clearsky(a) => cmd_clearsky(a),
        Command::Kindex(a) => cmd_kindex(a),
        Command::Forecast(a) => cmd_forecast(a),
        Command::Benchmark(a) => cmd_harness(a, true),
        Command::LeadtimeStudy(a) => cmd_harness(a, false),
        Command::Synth(a) => cmd_synth(a),
    }
}

fn load_site(path: &PathBuf) -> Result<SiteAtmosphere> {
    SiteAtmosphere::parse_config(&fs::read_to_string(path)?)
}

fn load_measured(path: &PathBuf) -> Result<IrradianceSeries> {
    series::parse_csv(&fs::read_to_string(path)?)
}

fn emit(out: Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Season length defaulting to one day of samples at the data's step.
fn season_length(explicit: Option<usize>, step_s: u32) -> Result<usize> {
    if let Some(len_l) = explicit {
        return Ok(len_l);
    }
    if 86_400 % step_s != 0 {
        return Err(Error::Validation(format!(
            "step {step_s}s does not divide a day; pass --season-length explicitly"
        )));
    }
    Ok((86_400 / step_s) as usize)
}

/// Training window: plain sample count, or "<n>L" multiples of the
/// season length.
fn parse_train(text: &str, len_l: usize) -> Result<usize> {
    let bad = || Error::Validation(format!("invalid --train value '{text}'"));
    if let Some(mult) = text.strip_suffix('L') {
        let n: usize = mult.parse().map_err(|_| bad())?;
        Ok(n * len_l)
    } else {
        text.parse().map_err(|_| bad())
    }
}

/// Lead time: plain step count, or "<n>m" minutes. Minutes must land on a
/// whole number of steps; rounding would silently change the horizon.
fn parse_lead(text: &str, step_s: u32) -> Result<usize> {
    let bad = || Error::Validation(format!("invalid lead value '{text}'"));
    let steps = if let Some(minutes) = text.strip_suffix('m') {
        let mins: u64 = minutes.parse().map_err(|_| bad())?;
        let secs = mins * 60;
        if !secs.is_multiple_of(step_s as u64) {
            return Err(Error::Validation(format!(
                "lead {mins} min is not a whole number of {step_s}s steps"
            )));
        }
        (secs / step_s as u64) as usize
    } else {
        text.parse().map_err(|_| bad())?
    };
    if steps == 0 {
        return Err(Error::Validation(format!("lead '{text}' must be positive")));
    }
    Ok(steps)
}

fn check_train_minimum(train: usize, len_l: usize) -> Result<()> {
    if train < 2 * len_l {
        return Err(Error::Validation(format!(
            "training window {train} below the 2L minimum of {} (L = {len_l})",
            2 * len_l
        )));
    }
    Ok(())
}

fn cmd_clearsky(a: ClearskyArgs) -> Result<()> {
    let atm = load_site(&a.site)?;
    if a.step == 0 {
        return Err(Error::Validation("--step must be > 0".into()));
    }
    let start = Timestamp::parse(&a.start)?;
    let n = (a.hours as u64 * 3600 / a.step as u64) as usize;
    if n == 0 {
        return Err(Error::Validation("--hours too small for one sample".into()));
    }
    let clear = clear_sky::clear_sky_series(&atm, start, a.step, n)?;
    emit(a.out, &series::write_csv(&clear))
}

fn cmd_kindex(a: KindexArgs) -> Result<()> {
    let atm = load_site(&a.site)?;
    let measured = load_measured(&a.measured)?;
    let clear = clear_sky::clear_sky_series(
        &atm,
        measured.start(),
        measured.step_seconds(),
        measured.len(),
    )?;
    let k = clear_sky::clearness_index(&measured, &clear)?;
    let mut out = String::from("timestamp_utc,k,valid\n");
    for i in 0..k.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            k.timestamp_at(i),
            k.k()[i],
            if k.mask()[i] { 1 } else { 0 }
        ));
    }
    emit(a.out, &out)
}

fn cmd_forecast(a: ForecastArgs) -> Result<()> {
    let atm = load_site(&a.site)?;
    let measured = load_measured(&a.measured)?;
    let len_l = season_length(a.season_length, measured.step_seconds())?;
    let train = parse_train(&a.train, len_l)?;
    check_train_minimum(train, len_l)?;
    let m_max = parse_lead(&a.lead, measured.step_seconds())?;
    let mode = SeasonalInit::parse(&a.seasonal_init)?;
    if measured.len() < train {
        return Err(Error::InsufficientData(format!(
            "series has {} samples, training needs {train}",
            measured.len()
        )));
    }

    let params = if a.fit {
        let window = measured.slice(measured.len() - train, measured.len())?;
        let clear = clear_sky::clear_sky_series(
            &atm,
            window.start(),
            window.step_seconds(),
            window.len(),
        )?;
        let k = clear_sky::clearness_index(&window, &clear)?;
        tes::fit(&k, len_l, mode)?
    } else {
        TesParams::new(a.alpha, a.beta, a.gamma, len_l, mode)?
    };

    let forecast = tes::run_pipeline(&measured, &atm, train, m_max, &params)?;
    let origin = measured.timestamp_at(measured.len() - 1);
    let step_s = measured.step_seconds();
    let mut out = String::from("timestamp_utc,k_hat,ghi_wm2\n");
    for p in &forecast.points {
        let t = origin.offset(p.steps_ahead as i64 * step_s as i64);
        let ghi = match clear_sky::bird_components(&atm, t)? {
            Some(c) => p.k_hat * c.total,
            None => 0.0,
        };
        out.push_str(&format!("{t},{},{ghi}\n", p.k_hat));
    }
    emit(a.out, &out)
}

fn cmd_harness(a: HarnessArgs, bench: bool) -> Result<()> {
    let atm = load_site(&a.site)?;
    let measured = load_measured(&a.measured)?;
    let step_s = measured.step_seconds();
    let len_l = season_length(a.season_length, step_s)?;
    let train = parse_train(&a.train, len_l)?;
    check_train_minimum(train, len_l)?;
    let mut lead_steps = Vec::new();
    for part in a.leads.split(',') {
        lead_steps.push(parse_lead(part.trim(), step_s)?);
    }
    let mode = SeasonalInit::parse(&a.seasonal_init)?;
    let params = TesParams::new(a.alpha, a.beta, a.gamma, len_l, mode)?;

    let clear = clear_sky::clear_sky_series(&atm, measured.start(), step_s, measured.len())?;
    let k = clear_sky::clearness_index(&measured, &clear)?;

    let methods = if bench {
        vec![Method::Tes, Method::Persistence, Method::Average]
    } else {
        vec![Method::Tes]
    };
    let cfg = ExperimentConfig {
        train_len: train,
        lead_steps,
        n_experiments: a.experiments,
        seed: a.seed,
        methods,
        tes_params: params,
        average_window: a.average_window,
    };
    let report = if bench {
        eval::benchmark(&k, &cfg)?
    } else {
        eval::leadtime_study(&k, &cfg)?
    };
    fs::write(&a.json, report.to_json())?;
    if let Some(csv) = &a.csv {
        fs::write(csv, report.to_csv())?;
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let atm = load_site(&a.site)?;
    let cfg = SynthConfig {
        site: atm,
        year: a.year,
        step_s: a.step,
        cloud_persistence: a.cloud_persistence,
        cloud_depth: a.cloud_depth,
        seed: a.seed,
    };
    let data = synth::synthesize_year(&cfg)?;
    emit(a.out, &series::write_csv(&data))
}
