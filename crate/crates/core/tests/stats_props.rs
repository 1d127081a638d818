//! Algebraic properties of the correlation and regression routines.

use claimlens::stats::{descriptive_stats, fit_linear, fit_logarithmic, pearson, residuals};
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// 3..12 points with a predictor that is not (numerically) constant.
fn series() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..12)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(-100.0f64..100.0, n),
                prop::collection::vec(-100.0f64..100.0, n),
            )
        })
        .prop_filter("spread in both series", |(x, y)| {
            spread(x) > 1e-3 && spread(y) > 1e-3
        })
}

fn positive_series() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..12)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(1e-4f64..50.0, n),
                prop::collection::vec(-10.0f64..10.0, n),
            )
        })
        .prop_filter("spread in ln x", |(x, _)| {
            let l: Vec<f64> = x.iter().map(|v| v.ln()).collect();
            spread(&l) > 1e-3
        })
}

fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn residuals_sum_to_zero((x, y) in series()) {
        let fit = fit_linear(&x, &y).unwrap();
        let r = residuals(&fit, &x, &y).unwrap();
        let scale: f64 = y.iter().map(|v| v.abs()).sum::<f64>() + 1.0;
        prop_assert!(r.iter().sum::<f64>().abs() <= 1e-9 * scale);
    }

    #[test]
    fn r_squared_is_pearson_squared((x, y) in series()) {
        let fit = fit_linear(&x, &y).unwrap();
        let r = pearson(&x, &y).unwrap();
        prop_assert!(close(fit.r_squared, r * r, 1e-9), "{} vs {}", fit.r_squared, r * r);
        prop_assert!(close(fit.multiple_r, fit.r_squared.sqrt(), 1e-12));
    }

    #[test]
    fn pearson_scale_shift_invariant(
        (x, y) in series(),
        a in 0.01f64..100.0,
        b in -1e3f64..1e3,
        c in 0.01f64..100.0,
        d in -1e3f64..1e3,
        flip in any::<bool>(),
    ) {
        let r = pearson(&x, &y).unwrap();
        let sign = if flip { -1.0 } else { 1.0 };
        let x2: Vec<f64> = x.iter().map(|v| sign * a * v + b).collect();
        let y2: Vec<f64> = y.iter().map(|v| c * v + d).collect();
        let r2 = pearson(&x2, &y2).unwrap();
        prop_assert!((r2 - sign * r).abs() <= 1e-8, "{r2} vs {}", sign * r);
        prop_assert!((-1.0..=1.0).contains(&r));
    }

    #[test]
    fn log_fit_is_linear_fit_on_ln_x((x, y) in positive_series()) {
        let log = fit_logarithmic(&x, &y).unwrap();
        let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let lin = fit_linear(&lx, &y).unwrap();
        prop_assert_eq!(log.slope, lin.slope);
        prop_assert_eq!(log.intercept, lin.intercept);
        prop_assert_eq!(log.r_squared, lin.r_squared);
    }

    #[test]
    fn descriptive_relations(v in prop::collection::vec(-1e3f64..1e3, 2..30)) {
        let s = descriptive_stats(&v).unwrap();
        prop_assert!(s.minimum <= s.median && s.median <= s.maximum);
        prop_assert!(s.minimum <= s.mean + 1e-9 && s.mean <= s.maximum + 1e-9);
        prop_assert!(close(s.range, s.maximum - s.minimum, 1e-12));
        prop_assert!(close(s.standard_deviation * s.standard_deviation, s.sample_variance, 1e-9));
        prop_assert!(close(s.standard_error, s.standard_deviation / (v.len() as f64).sqrt(), 1e-9));
        prop_assert_eq!(s.count, v.len());
    }
}
