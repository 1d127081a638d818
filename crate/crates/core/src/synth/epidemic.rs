use chrono::Datelike;

use super::config::{GrowthKind, SynthConfig};
use super::SynthError;
use crate::claims::{CovidDailyRecord, YearMonth};

/// Cumulative infections `t` months after the epidemic start.
pub fn cumulative_cases(cfg: &SynthConfig, t: f64) -> f64 {
    let e = &cfg.epidemic;
    if t < 0.0 {
        return 0.0;
    }
    match e.kind {
        GrowthKind::Exponential => e.initial * (e.rate * t).exp(),
        GrowthKind::Logistic => {
            if e.initial <= 0.0 {
                0.0
            } else {
                e.capacity / (1.0 + (e.capacity / e.initial - 1.0) * (-e.rate * t).exp())
            }
        }
    }
}

/// Daily cumulative counts from the first day of the month before the range
/// through its last day. Day `d` of the `m`-th epidemic month sits at
/// `t = m + d / days_in_month`, so each month-end lands on a whole month.
pub fn generate_epidemic(cfg: &SynthConfig) -> Result<Vec<CovidDailyRecord>, SynthError> {
    if cfg.months.is_empty() {
        return Err(SynthError::Usage(format!(
            "month range {}..{} is reversed",
            cfg.months.from, cfg.months.to
        )));
    }
    let start = cfg.epidemic.start;
    let mut out = Vec::new();
    let mut month = cfg.months.from.pred();
    let mut last = 0u64;
    loop {
        let days = month.days();
        let mut date = month.first_day();
        for _ in 0..days {
            let offset = start.months_until(month);
            let value = if offset < 0 {
                0
            } else {
                let t = offset as f64 + date.day() as f64 / days as f64;
                cumulative_cases(cfg, t).round().min(u64::MAX as f64) as u64
            };
            // Rounding of a non-decreasing curve cannot fall, but guard anyway.
            last = last.max(value);
            out.push(CovidDailyRecord {
                date,
                region: cfg.region.clone(),
                cumulative_infected: last,
            });
            date = date.succ_opt().expect("date in range");
        }
        if month == cfg.months.to {
            break;
        }
        month = month.succ();
    }
    Ok(out)
}

/// Month-end cumulative counts, for checking against the closed form.
pub fn month_end_cumulative(records: &[CovidDailyRecord], month: YearMonth) -> Option<u64> {
    records
        .iter()
        .rev()
        .find(|r| r.date <= month.last_day())
        .map(|r| r.cumulative_infected)
}
