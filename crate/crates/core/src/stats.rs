//! Sample statistics: mean, standard deviation and type-7 empirical quantiles.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    Empty,
    #[error("quantile level {0} outside [0, 1]")]
    LevelOutOfRange(f64),
    #[error("quantile levels must be strictly increasing")]
    LevelsNotIncreasing,
    #[error("sample contains a non-finite value")]
    NonFinite,
}

/// Levels reported for single-home loss tables.
pub const DEFAULT_LEVELS: [f64; 8] = [0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 0.995, 0.999];

pub fn mean(xs: &[f64]) -> Result<f64, StatsError> {
    if xs.is_empty() {
        return Err(StatsError::Empty);
    }
    Ok(xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation (divisor n-1); zero for a single observation.
pub fn sample_sd(xs: &[f64]) -> Result<f64, StatsError> {
    let m = mean(xs)?;
    if xs.len() < 2 {
        return Ok(0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Ok((ss / (xs.len() - 1) as f64).sqrt())
}

/// Type-7 quantile of an ascending slice: linear interpolation between
/// order statistics at position `(n-1)p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> Result<f64, StatsError> {
    if sorted.is_empty() {
        return Err(StatsError::Empty);
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(StatsError::LevelOutOfRange(p));
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let (a, b) = (sorted[lo], sorted[hi]);
    if lo == hi || a == b {
        return Ok(a);
    }
    Ok(a + (h - lo as f64) * (b - a))
}

pub fn quantile(xs: &[f64], p: f64) -> Result<f64, StatsError> {
    quantile_sorted(&sorted_copy(xs)?, p)
}

pub(crate) fn sorted_copy(xs: &[f64]) -> Result<Vec<f64>, StatsError> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub sd: f64,
    /// `(level, value)` pairs in increasing level order.
    pub quantiles: Vec<(f64, f64)>,
}

impl SummaryStats {
    /// Quantile at an exact level previously requested from [`summarize`].
    pub fn quantile(&self, level: f64) -> Option<f64> {
        self.quantiles
            .iter()
            .find(|(l, _)| *l == level)
            .map(|(_, v)| *v)
    }
}

pub fn summarize(samples: &[f64], levels: &[f64]) -> Result<SummaryStats, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::Empty);
    }
    if let Some(bad) = levels.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(StatsError::LevelOutOfRange(*bad));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(StatsError::LevelsNotIncreasing);
    }
    let sorted = sorted_copy(samples)?;
    let quantiles = levels
        .iter()
        .map(|&p| quantile_sorted(&sorted, p).map(|q| (p, q)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SummaryStats {
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        mean: mean(samples)?,
        sd: sample_sd(samples)?,
        quantiles,
    })
}
