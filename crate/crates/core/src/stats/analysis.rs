//! The fraud-versus-infection analysis over a monthly series.

use serde::{Deserialize, Serialize};

use super::{
    descriptive_stats, fit_linear, fit_logarithmic, pearson, predict, DescriptiveStats,
    RegressionFit, StatsError,
};
use crate::claims::{MonthRange, MonthlyPoint, YearMonth};

pub const ANALYSIS_FORMAT: &str = "claimlens-analysis";
pub const ANALYSIS_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthFit {
    pub month: YearMonth,
    pub covid_rate: f64,
    pub fraud_rate: f64,
    pub linear_prediction: f64,
    pub linear_residual: f64,
    pub logarithmic_prediction: Option<f64>,
    pub logarithmic_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub format: String,
    pub version: u32,
    pub from: YearMonth,
    pub to: YearMonth,
    pub covid_rate_stats: DescriptiveStats,
    pub fraud_rate_stats: DescriptiveStats,
    pub pearson: f64,
    pub linear: RegressionFit,
    pub logarithmic: Option<RegressionFit>,
    /// Months left out of the logarithmic fit because their infection rate is not positive.
    pub logarithmic_excluded: Vec<YearMonth>,
    pub months: Vec<MonthFit>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("window {from}..{to} holds {rows} usable month(s); at least 2 are needed")]
    TooFewRows {
        from: YearMonth,
        to: YearMonth,
        rows: usize,
    },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Descriptive statistics, correlation and both regressions over the months in `[from, to]`.
pub fn analyze(
    points: &[MonthlyPoint],
    from: YearMonth,
    to: YearMonth,
) -> Result<AnalysisReport, AnalysisError> {
    let window = MonthRange::new(from, to);
    let mut rows: Vec<&MonthlyPoint> = points.iter().filter(|p| window.contains(p.month)).collect();
    rows.sort_by_key(|p| p.month);
    if rows.len() < 2 {
        return Err(AnalysisError::TooFewRows {
            from,
            to,
            rows: rows.len(),
        });
    }
    let x: Vec<f64> = rows.iter().map(|p| p.covid_rate).collect();
    let y: Vec<f64> = rows.iter().map(|p| p.fraud_rate).collect();

    let covid_rate_stats = descriptive_stats(&x)?;
    let fraud_rate_stats = descriptive_stats(&y)?;
    let r = pearson(&x, &y)?;
    let linear = fit_linear(&x, &y)?;

    let (log_rows, excluded): (Vec<&&MonthlyPoint>, Vec<&&MonthlyPoint>) =
        rows.iter().partition(|p| p.covid_rate > 0.0);
    let logarithmic = if log_rows.len() >= 2 {
        let lx: Vec<f64> = log_rows.iter().map(|p| p.covid_rate).collect();
        let ly: Vec<f64> = log_rows.iter().map(|p| p.fraud_rate).collect();
        match fit_logarithmic(&lx, &ly) {
            Ok(f) => Some(f),
            Err(StatsError::SingularDesign) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };

    let months = rows
        .iter()
        .map(|p| {
            let linear_prediction = predict(&linear, p.covid_rate)?;
            let log_pred = match &logarithmic {
                Some(f) if p.covid_rate > 0.0 => Some(predict(f, p.covid_rate)?),
                _ => None,
            };
            Ok(MonthFit {
                month: p.month,
                covid_rate: p.covid_rate,
                fraud_rate: p.fraud_rate,
                linear_prediction,
                linear_residual: p.fraud_rate - linear_prediction,
                logarithmic_prediction: log_pred,
                logarithmic_residual: log_pred.map(|v| p.fraud_rate - v),
            })
        })
        .collect::<Result<Vec<_>, StatsError>>()?;

    Ok(AnalysisReport {
        format: ANALYSIS_FORMAT.to_string(),
        version: ANALYSIS_VERSION,
        from,
        to,
        covid_rate_stats,
        fraud_rate_stats,
        pearson: r,
        linear,
        logarithmic,
        logarithmic_excluded: excluded.iter().map(|p| p.month).collect(),
        months,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(month: &str, fraud: f64, covid: f64) -> MonthlyPoint {
        MonthlyPoint {
            month: month.parse().unwrap(),
            reported_claims: 0,
            fraud_claims: 0,
            fraud_rate: fraud,
            covid_cases: 0,
            covid_rate: covid,
        }
    }

    #[test]
    fn zero_covid_month_is_excluded_from_log_fit() {
        let pts = vec![
            point("2020-02", 0.04, 0.0),
            point("2020-03", 0.06, 0.0001),
            point("2020-04", 0.07, 0.0002),
            point("2020-05", 0.09, 0.0008),
        ];
        let rep = analyze(&pts, "2020-02".parse().unwrap(), "2020-05".parse().unwrap()).unwrap();
        assert_eq!(rep.logarithmic_excluded, vec!["2020-02".parse().unwrap()]);
        assert_eq!(rep.logarithmic.as_ref().unwrap().n, 3);
        assert_eq!(rep.linear.n, 4);
        assert!(rep.months[0].logarithmic_prediction.is_none());
        assert!(rep.months[1].logarithmic_prediction.is_some());
    }

    #[test]
    fn single_month_window_is_rejected() {
        let pts = vec![
            point("2020-03", 0.06, 0.0001),
            point("2020-04", 0.07, 0.0002),
        ];
        let m: YearMonth = "2020-03".parse().unwrap();
        assert!(matches!(
            analyze(&pts, m, m),
            Err(AnalysisError::TooFewRows { rows: 1, .. })
        ));
    }
}
