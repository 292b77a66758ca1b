//! Irradiance time series: CSV ingest/emit, gap handling and resampling.
//!
//! The canonical CSV schema is a header line `timestamp_utc,ghi_wm2`
//! followed by one row per sample. Timestamps are ISO-8601 UTC
//! (`YYYY-MM-DDThh:mm:ssZ`), values use a decimal point and no thousands
//! separators. An empty value field or `NaN` marks a missing sample.

use chrono::{DateTime, Datelike, NaiveDate, TimeZone, Timelike, Utc};
use std::fmt;

use crate::error::{Error, Result};

/// A UTC calendar instant with second resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(DateTime<Utc>);

impl Timestamp {
    pub fn from_ymd_hms(y: i32, mo: u32, d: u32, h: u32, mi: u32, s: u32) -> Result<Self> {
        Utc.with_ymd_and_hms(y, mo, d, h, mi, s)
            .single()
            .map(Timestamp)
            .ok_or_else(|| Error::Validation(format!("invalid UTC instant {y}-{mo}-{d} {h}:{mi}:{s}")))
    }

    pub fn from_unix(secs: i64) -> Self {
        Timestamp(Utc.timestamp_opt(secs, 0).unwrap())
    }

    /// Parses `YYYY-MM-DDThh:mm:ssZ`.
    pub fn parse(text: &str) -> Result<Self> {
        let dt = DateTime::parse_from_rfc3339(text)
            .map_err(|e| Error::Validation(format!("invalid timestamp {text:?}: {e}")))?;
        Ok(Timestamp(dt.with_timezone(&Utc)))
    }

    pub fn unix_seconds(&self) -> i64 {
        self.0.timestamp()
    }

    pub fn year(&self) -> i32 {
        self.0.year()
    }

    /// Day of year, 1-based.
    pub fn ordinal_day(&self) -> u32 {
        self.0.ordinal()
    }

    pub fn date(&self) -> NaiveDate {
        self.0.date_naive()
    }

    /// Hours since UTC midnight, fractional.
    pub fn fractional_hour(&self) -> f64 {
        self.0.hour() as f64 + self.0.minute() as f64 / 60.0 + self.0.second() as f64 / 3600.0
    }

    pub fn offset(&self, seconds: i64) -> Self {
        Timestamp::from_unix(self.unix_seconds() + seconds)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%dT%H:%M:%SZ"))
    }
}

/// Uniformly sampled global horizontal irradiance with a gap mask.
///
/// A sample flagged invalid carries no semantic value; forecasters and
/// metrics never read it.
#[derive(Debug, Clone, PartialEq)]
pub struct IrradianceSeries {
    start: Timestamp,
    step_s: u32,
    values: Vec<f64>,
    valid: Vec<bool>,
}

impl IrradianceSeries {
    pub fn new(start: Timestamp, step_s: u32, mut values: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        if step_s == 0 {
            return Err(Error::Validation("step must be > 0".into()));
        }
        if values.len() != valid.len() {
            return Err(Error::Validation(format!(
                "values ({}) and valid ({}) lengths differ",
                values.len(),
                valid.len()
            )));
        }
        for (i, (v, &ok)) in values.iter_mut().zip(&valid).enumerate() {
            if ok {
                if !(v.is_finite() && *v >= 0.0) {
                    return Err(Error::Validation(format!(
                        "sample {i} is flagged valid but has irradiance {v}"
                    )));
                }
            } else {
                // invalid samples carry no semantic value; canonicalize
                *v = 0.0;
            }
        }
        Ok(IrradianceSeries { start, step_s, values, valid })
    }

    pub fn start(&self) -> Timestamp {
        self.start
    }

    pub fn step_seconds(&self) -> u32 {
        self.step_s
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn timestamp_at(&self, index: usize) -> Timestamp {
        self.start.offset(index as i64 * self.step_s as i64)
    }

    /// Copies the half-open index range out as a standalone series.
    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        if from >= to || to > self.len() {
            return Err(Error::Validation(format!(
                "slice {from}..{to} out of range for length {}",
                self.len()
            )));
        }
        IrradianceSeries::new(
            self.timestamp_at(from),
            self.step_s,
            self.values[from..to].to_vec(),
            self.valid[from..to].to_vec(),
        )
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Parses the canonical two-column CSV into a series.
///
/// The native step is inferred as the greatest common divisor of the
/// timestamp deltas; missing grid slots become invalid-masked samples.
pub fn parse_csv(text: &str) -> Result<IrradianceSeries> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "timestamp_utc,ghi_wm2" => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header 'timestamp_utc,ghi_wm2', got {h:?}"),
            })
        }
        None => return Err(Error::InsufficientData("empty input".into())),
    }

    let mut rows: Vec<(Timestamp, Option<f64>)> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let (ts_str, val_str) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: lineno,
            msg: "expected two comma-separated fields".into(),
        })?;
        let ts = Timestamp::parse(ts_str).map_err(|e| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        if let Some((prev, _)) = rows.last() {
            if ts <= *prev {
                return Err(Error::Ordering { line: lineno });
            }
        }
        let val_str = val_str.trim();
        let value = if val_str.is_empty() || val_str.eq_ignore_ascii_case("nan") {
            None
        } else {
            let v: f64 = val_str.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("invalid irradiance value {val_str:?}"),
            })?;
            if v < 0.0 {
                return Err(Error::Validation(format!(
                    "negative irradiance {v} at line {lineno}"
                )));
            }
            Some(v)
        };
        rows.push((ts, value));
    }

    if rows.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 data rows, got {}",
            rows.len()
        )));
    }

    let t0 = rows[0].0.unix_seconds();
    let mut step = 0i64;
    for w in rows.windows(2) {
        step = gcd(step, w[1].0.unix_seconds() - w[0].0.unix_seconds());
    }
    debug_assert!(step > 0);

    let span = rows.last().unwrap().0.unix_seconds() - t0;
    let n = (span / step) as usize + 1;
    let mut values = vec![0.0; n];
    let mut valid = vec![false; n];
    for (ts, value) in rows {
        let slot = ((ts.unix_seconds() - t0) / step) as usize;
        if let Some(v) = value {
            values[slot] = v;
            valid[slot] = true;
        }
    }
    IrradianceSeries::new(Timestamp::from_unix(t0), step as u32, values, valid)
}

/// Emits the canonical CSV; invalid samples get an empty value field.
pub fn write_csv(series: &IrradianceSeries) -> String {
    let mut out = String::from("timestamp_utc,ghi_wm2\n");
    for i in 0..series.len() {
        out.push_str(&series.timestamp_at(i).to_string());
        out.push(',');
        if series.valid()[i] {
            out.push_str(&format!("{}", series.values()[i]));
        }
        out.push('\n');
    }
    out
}

/// Mean-resamples onto a coarser grid.
///
/// Each output sample is the arithmetic mean of the valid input samples in
/// its window `[t, t + target_step)`; the output is invalid iff every input
/// in the window is invalid.
pub fn resample(series: &IrradianceSeries, target_step_s: u32) -> Result<IrradianceSeries> {
    let step = series.step_seconds();
    if target_step_s < step {
        return Err(Error::Unsupported(format!(
            "cannot upsample from {step} s to {target_step_s} s"
        )));
    }
    if !target_step_s.is_multiple_of(step) {
        return Err(Error::Alignment(format!(
            "target step {target_step_s} s is not an integer multiple of {step} s"
        )));
    }
    let ratio = (target_step_s / step) as usize;
    if ratio == 1 {
        return Ok(series.clone());
    }
    let mut values = Vec::with_capacity(series.len().div_ceil(ratio));
    let mut valid = Vec::with_capacity(values.capacity());
    for window in series.values().chunks(ratio).zip(series.valid().chunks(ratio)) {
        let (vals, mask) = window;
        let mut sum = 0.0;
        let mut count = 0usize;
        for (&v, &ok) in vals.iter().zip(mask) {
            if ok {
                sum += v;
                count += 1;
            }
        }
        if count > 0 {
            values.push(sum / count as f64);
            valid.push(true);
        } else {
            values.push(0.0);
            valid.push(false);
        }
    }
    IrradianceSeries::new(series.start(), target_step_s, values, valid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(s: &str) -> Timestamp {
        Timestamp::parse(s).unwrap()
    }

    #[test]
    fn parse_minimal_two_rows() {
        let s = parse_csv("timestamp_utc,ghi_wm2\n2015-06-01T10:00:00Z,100.0\n2015-06-01T10:01:00Z,200.0\n")
            .unwrap();
        assert_eq!(s.step_seconds(), 60);
        assert_eq!(s.values(), &[100.0, 200.0]);
        assert!(s.valid().iter().all(|&v| v));
    }

    #[test]
    fn parse_fills_grid_gaps_with_invalid() {
        let s = parse_csv(
            "timestamp_utc,ghi_wm2\n2015-06-01T10:00:00Z,1\n2015-06-01T10:01:00Z,2\n2015-06-01T10:03:00Z,4\n",
        )
        .unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.step_seconds(), 60);
        assert!(!s.valid()[2]);
        assert!(s.valid()[3]);
        assert_eq!(s.values()[3], 4.0);
    }

    #[test]
    fn parse_errors() {
        let bad_ts = parse_csv("timestamp_utc,ghi_wm2\nnot-a-time,1\n2015-06-01T10:01:00Z,2\n");
        assert!(matches!(bad_ts, Err(Error::Parse { line: 2, .. })));

        let non_mono = parse_csv(
            "timestamp_utc,ghi_wm2\n2015-06-01T10:01:00Z,1\n2015-06-01T10:00:00Z,2\n",
        );
        assert!(matches!(non_mono, Err(Error::Ordering { line: 3 })));

        let short = parse_csv("timestamp_utc,ghi_wm2\n2015-06-01T10:00:00Z,1\n");
        assert!(matches!(short, Err(Error::InsufficientData(_))));

        let neg = parse_csv(
            "timestamp_utc,ghi_wm2\n2015-06-01T10:00:00Z,-5\n2015-06-01T10:01:00Z,2\n",
        );
        assert!(matches!(neg, Err(Error::Validation(_))));
    }

    #[test]
    fn missing_values_are_masked() {
        let s = parse_csv(
            "timestamp_utc,ghi_wm2\n2015-06-01T10:00:00Z,\n2015-06-01T10:01:00Z,NaN\n2015-06-01T10:02:00Z,3\n",
        )
        .unwrap();
        assert_eq!(s.valid(), &[false, false, true]);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let start = ts("2015-03-01T00:00:00Z");
        let values = vec![0.0, 12.625, 103.0078125, 999.25, 0.1];
        let valid = vec![true, true, false, true, true];
        let s = IrradianceSeries::new(start, 30, values, valid).unwrap();
        let round = parse_csv(&write_csv(&s)).unwrap();
        assert_eq!(s, round);
    }

    #[test]
    fn resample_constant_window() {
        let s = IrradianceSeries::new(ts("2015-06-01T10:00:00Z"), 30, vec![100.0; 10], vec![true; 10]).unwrap();
        let r = resample(&s, 300).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.values()[0], 100.0);
    }

    #[test]
    fn resample_is_window_mean() {
        let vals = vec![0.0, 0.0, 0.0, 0.0, 0.0, 600.0, 600.0, 600.0, 600.0, 600.0];
        let s = IrradianceSeries::new(ts("2015-06-01T10:00:00Z"), 30, vals, vec![true; 10]).unwrap();
        let r = resample(&s, 300).unwrap();
        assert_eq!(r.values(), &[300.0]);
    }

    #[test]
    fn resample_errors() {
        let s = IrradianceSeries::new(ts("2015-06-01T10:00:00Z"), 60, vec![1.0; 4], vec![true; 4]).unwrap();
        assert!(matches!(resample(&s, 90), Err(Error::Alignment(_))));
        assert!(matches!(resample(&s, 30), Err(Error::Unsupported(_))));
    }

    #[test]
    fn resample_all_invalid_window_stays_invalid() {
        let s = IrradianceSeries::new(
            ts("2015-06-01T10:00:00Z"),
            60,
            vec![1.0, 2.0, 0.0, 0.0],
            vec![true, true, false, false],
        )
        .unwrap();
        let r = resample(&s, 120).unwrap();
        assert_eq!(r.valid(), &[true, false]);
        assert_eq!(r.values()[0], 1.5);
    }

    #[test]
    fn resample_idempotent() {
        let vals: Vec<f64> = (0..17).map(|i| (i * 7 % 13) as f64).collect();
        let mask: Vec<bool> = (0..17).map(|i| i % 5 != 0).collect();
        let s = IrradianceSeries::new(ts("2015-06-01T10:00:00Z"), 30, vals, mask).unwrap();
        let once = resample(&s, 120).unwrap();
        let twice = resample(&once, 120).unwrap();
        assert_eq!(once, twice);
    }
}
