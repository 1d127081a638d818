//! Descriptive statistics, Pearson correlation and least-squares regression.

mod analysis;
mod descriptive;
mod regression;

pub use analysis::{
    analyze, AnalysisError, AnalysisReport, MonthFit, ANALYSIS_FORMAT, ANALYSIS_VERSION,
};
pub use descriptive::{descriptive_stats, mean, DescriptiveStats};
pub use regression::{
    fit_linear, fit_logarithmic, pearson, predict, residuals, FitKind, RegressionFit,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("series is empty")]
    Empty,
    #[error("series lengths differ: {x} vs {y}")]
    LengthMismatch { x: usize, y: usize },
    #[error("{n} observation(s); at least {needed} required")]
    TooFew { n: usize, needed: usize },
    #[error("series {series} has zero variance")]
    ZeroVariance { series: &'static str },
    #[error("predictor is constant; regression is singular")]
    SingularDesign,
    #[error("logarithm undefined for x[{index}] = {value}")]
    LogDomain { index: usize, value: f64 },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
}
