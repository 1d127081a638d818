use serde::{Deserialize, Serialize};

use super::StatsError;

/// Summary statistics of one series, using the sample (n − 1) variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub mean: f64,
    pub standard_error: f64,
    pub median: f64,
    pub standard_deviation: f64,
    pub sample_variance: f64,
    pub range: f64,
    pub minimum: f64,
    pub maximum: f64,
    pub count: usize,
}

pub fn mean(series: &[f64]) -> f64 {
    series.iter().sum::<f64>() / series.len() as f64
}

pub fn descriptive_stats(series: &[f64]) -> Result<DescriptiveStats, StatsError> {
    if series.is_empty() {
        return Err(StatsError::Empty);
    }
    if let Some(i) = series.iter().position(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite { index: i });
    }
    let n = series.len();
    let mean = mean(series);
    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let (sample_variance, standard_deviation, standard_error) = if n >= 2 {
        let ss: f64 = series.iter().map(|v| (v - mean).powi(2)).sum();
        let var = ss / (n - 1) as f64;
        let sd = var.sqrt();
        (var, sd, sd / (n as f64).sqrt())
    } else {
        (0.0, 0.0, 0.0)
    };
    let minimum = sorted[0];
    let maximum = sorted[n - 1];
    Ok(DescriptiveStats {
        mean,
        standard_error,
        median,
        standard_deviation,
        sample_variance,
        range: maximum - minimum,
        minimum,
        maximum,
        count: n,
    })
}
