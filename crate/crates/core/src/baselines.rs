//! Persistence and trailing-average reference forecasters.
//!
//! Both are horizon-flat: the same value is emitted for every lead.

use crate::clear_sky::{ClearnessSeries, K_MAX};
use crate::error::{Error, Result};
use crate::tes::{Forecast, ForecastPoint};

/// Which baseline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Persistence,
    /// Mean over the trailing `window` samples.
    Average { window: usize },
}

fn flat_forecast(origin_index: usize, value: f64, m_max: usize) -> Forecast {
    let k = value.clamp(0.0, K_MAX);
    Forecast {
        origin_index,
        points: (1..=m_max)
            .map(|m| ForecastPoint { steps_ahead: m, k_hat: k, k_hat_raw: value })
            .collect(),
    }
}

/// Repeats the last valid clearness index for every lead.
pub fn persistence_forecast(history: &ClearnessSeries, m_max: usize) -> Result<Forecast> {
    let last_valid = history
        .mask()
        .iter()
        .rposition(|&m| m)
        .ok_or_else(|| Error::InsufficientData("history has no valid sample".into()))?;
    Ok(flat_forecast(history.len() - 1, history.k()[last_valid], m_max))
}

/// Mean of the valid clearness indices over the trailing window, repeated
/// for every lead.
pub fn average_forecast(history: &ClearnessSeries, window: usize, m_max: usize) -> Result<Forecast> {
    if window == 0 {
        return Err(Error::Validation("average window must be >= 1".into()));
    }
    let from = history.len().saturating_sub(window);
    let valid: Vec<f64> = (from..history.len())
        .filter(|&i| history.mask()[i])
        .map(|i| history.k()[i])
        .collect();
    if valid.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no valid samples in the trailing window of {window}"
        )));
    }
    // mean around the first value so a constant window averages to it exactly
    let base = valid[0];
    let mean = base + valid.iter().map(|v| v - base).sum::<f64>() / valid.len() as f64;
    Ok(flat_forecast(history.len() - 1, mean, m_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Timestamp;

    fn series(k: Vec<f64>, mask: Vec<bool>) -> ClearnessSeries {
        ClearnessSeries::new(Timestamp::parse("2015-06-01T00:00:00Z").unwrap(), 300, k, mask).unwrap()
    }

    #[test]
    fn persistence_repeats_last_value() {
        let h = series(vec![0.2, 0.5, 0.7], vec![true; 3]);
        let f = persistence_forecast(&h, 4).unwrap();
        assert_eq!(f.points.len(), 4);
        assert!(f.points.iter().all(|p| p.k_hat == 0.7));
    }

    #[test]
    fn persistence_skips_trailing_invalid() {
        let h = series(vec![0.4, 1.0, 1.0], vec![true, false, false]);
        let f = persistence_forecast(&h, 3).unwrap();
        assert!(f.points.iter().all(|p| p.k_hat == 0.4));
    }

    #[test]
    fn persistence_all_invalid_rejected() {
        let h = series(vec![1.0; 3], vec![false; 3]);
        assert!(matches!(persistence_forecast(&h, 2), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn average_is_window_mean() {
        let h = series(vec![0.2, 0.4, 0.6], vec![true; 3]);
        let f = average_forecast(&h, 3, 4).unwrap();
        for p in &f.points {
            assert!((p.k_hat - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn window_one_equals_persistence() {
        let h = series(vec![0.2, 0.9, 0.55], vec![true; 3]);
        let a = average_forecast(&h, 1, 4).unwrap();
        let p = persistence_forecast(&h, 4).unwrap();
        assert_eq!(a, p);
    }

    #[test]
    fn average_skips_invalid_in_window() {
        let h = series(vec![0.3, 1.0, 0.9], vec![true, false, true]);
        let f = average_forecast(&h, 3, 1).unwrap();
        assert!((f.points[0].k_hat - 0.6).abs() < 1e-12);
    }

    #[test]
    fn average_empty_window_rejected() {
        let h = series(vec![0.3, 1.0, 1.0], vec![true, false, false]);
        assert!(matches!(average_forecast(&h, 2, 1), Err(Error::InsufficientData(_))));
        assert!(matches!(average_forecast(&h, 0, 1), Err(Error::Validation(_))));
    }

    #[test]
    fn scale_equivariance() {
        let k = vec![0.1, 0.2, 0.3, 0.4];
        let h = series(k.clone(), vec![true; 4]);
        let scaled = series(k.iter().map(|v| v * 3.0).collect(), vec![true; 4]);
        let f1 = average_forecast(&h, 4, 2).unwrap();
        let f2 = average_forecast(&scaled, 4, 2).unwrap();
        assert!((f2.points[0].k_hat - 3.0 * f1.points[0].k_hat).abs() < 1e-12);
        let p1 = persistence_forecast(&h, 2).unwrap();
        let p2 = persistence_forecast(&scaled, 2).unwrap();
        assert!((p2.points[0].k_hat - 3.0 * p1.points[0].k_hat).abs() < 1e-12);
    }
}
