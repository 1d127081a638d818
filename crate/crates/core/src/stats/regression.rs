use serde::{Deserialize, Serialize};

use super::descriptive::mean;
use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    Linear,
    /// `y = slope · ln(x) + intercept`, natural logarithm.
    Logarithmic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub kind: FitKind,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Defined as √r_squared.
    pub multiple_r: f64,
    pub n: usize,
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(StatsError::TooFew {
            n: x.len(),
            needed: 2,
        });
    }
    if let Some(i) = x.iter().chain(y).position(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite { index: i % x.len() });
    }
    Ok(())
}

/// Centered sums Σ(x−x̄)², Σ(y−ȳ)², Σ(x−x̄)(y−ȳ).
fn centered_sums(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let mx = mean(x);
    let my = mean(y);
    x.iter()
        .zip(y)
        .fold((0.0, 0.0, 0.0), |(sxx, syy, sxy), (xi, yi)| {
            let dx = xi - mx;
            let dy = yi - my;
            (sxx + dx * dx, syy + dy * dy, sxy + dx * dy)
        })
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y)?;
    let (sxx, syy, sxy) = centered_sums(x, y);
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance { series: "x" });
    }
    if syy == 0.0 {
        return Err(StatsError::ZeroVariance { series: "y" });
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn fit(kind: FitKind, x: &[f64], y: &[f64]) -> Result<RegressionFit, StatsError> {
    check_pair(x, y)?;
    let (sxx, syy, sxy) = centered_sums(x, y);
    if sxx == 0.0 {
        return Err(StatsError::SingularDesign);
    }
    let slope = sxy / sxx;
    let intercept = mean(y) - slope * mean(x);
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = x
            .iter()
            .zip(y)
            .map(|(xi, yi)| (yi - (slope * xi + intercept)).powi(2))
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(RegressionFit {
        kind,
        slope,
        intercept,
        r_squared,
        multiple_r: r_squared.sqrt(),
        n: x.len(),
    })
}

/// Ordinary least squares with intercept.
pub fn fit_linear(x: &[f64], y: &[f64]) -> Result<RegressionFit, StatsError> {
    fit(FitKind::Linear, x, y)
}

fn ln_all(x: &[f64]) -> Result<Vec<f64>, StatsError> {
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            if v > 0.0 {
                Ok(v.ln())
            } else {
                Err(StatsError::LogDomain { index: i, value: v })
            }
        })
        .collect()
}

/// Least squares on `(ln x, y)`.
pub fn fit_logarithmic(x: &[f64], y: &[f64]) -> Result<RegressionFit, StatsError> {
    let lx = ln_all(x)?;
    fit(FitKind::Logarithmic, &lx, y)
}

pub fn predict(fit: &RegressionFit, x: f64) -> Result<f64, StatsError> {
    match fit.kind {
        FitKind::Linear => Ok(fit.slope * x + fit.intercept),
        FitKind::Logarithmic if x > 0.0 => Ok(fit.slope * x.ln() + fit.intercept),
        FitKind::Logarithmic => Err(StatsError::LogDomain { index: 0, value: x }),
    }
}

/// `y_i − predict(x_i)`, in input order.
pub fn residuals(fit: &RegressionFit, x: &[f64], y: &[f64]) -> Result<Vec<f64>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            x: x.len(),
            y: y.len(),
        });
    }
    x.iter()
        .zip(y)
        .enumerate()
        .map(|(i, (&xi, &yi))| match predict(fit, xi) {
            Ok(p) => Ok(yi - p),
            Err(StatsError::LogDomain { value, .. }) => {
                Err(StatsError::LogDomain { index: i, value })
            }
            Err(e) => Err(e),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force SSE minimization by successive grid refinement.
    fn grid_least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
        let sse = |a: f64, b: f64| -> f64 {
            x.iter()
                .zip(y)
                .map(|(xi, yi)| (yi - a * xi - b).powi(2))
                .sum()
        };
        let (mut a, mut b) = (0.0, 0.0);
        let mut step = 10.0;
        while step > 1e-9 {
            let mut best = (sse(a, b), a, b);
            for i in -20..=20 {
                for j in -20..=20 {
                    let (ca, cb) = (a + i as f64 * step, b + j as f64 * step);
                    let v = sse(ca, cb);
                    if v < best.0 {
                        best = (v, ca, cb);
                    }
                }
            }
            a = best.1;
            b = best.2;
            step /= 4.0;
        }
        (a, b)
    }

    #[test]
    fn linear_matches_grid_oracle() {
        let x = [0.3, 1.7, 4.2];
        let y = [2.9, 1.1, -0.4];
        let (a, b) = grid_least_squares(&x, &y);
        let f = fit_linear(&x, &y).unwrap();
        assert!((f.slope - a).abs() < 1e-6, "{} vs {a}", f.slope);
        assert!((f.intercept - b).abs() < 1e-6, "{} vs {b}", f.intercept);
    }

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 7.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let f = fit_linear(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 1.0).abs() < 1e-12);
        assert_eq!(f.r_squared, 1.0);
        assert_eq!(predict(&f, 0.0).unwrap(), f.intercept);
        assert!(residuals(&f, &x, &y)
            .unwrap()
            .iter()
            .all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn exact_log_curve() {
        let x = [0.5, 1.0, 2.0, 10.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.ln() + 2.0).collect();
        let f = fit_logarithmic(&x, &y).unwrap();
        assert_eq!(f.kind, FitKind::Logarithmic);
        assert!((f.slope - 3.0).abs() < 1e-12);
        assert!((f.intercept - 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_domain_errors_name_index() {
        assert_eq!(
            fit_logarithmic(&[1.0, 0.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::LogDomain {
                index: 1,
                value: 0.0
            })
        );
        let f = fit_logarithmic(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert!(predict(&f, -1.0).is_err());
        assert_eq!(
            residuals(&f, &[1.0, 0.0], &[1.0, 1.0]),
            Err(StatsError::LogDomain {
                index: 1,
                value: 0.0
            })
        );
    }

    #[test]
    fn pearson_extremes_and_errors() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::ZeroVariance { series: "x" })
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0]),
            Err(StatsError::LengthMismatch { .. })
        ));
        assert_eq!(
            fit_linear(&[2.0, 2.0], &[1.0, 3.0]),
            Err(StatsError::SingularDesign)
        );
    }
}
