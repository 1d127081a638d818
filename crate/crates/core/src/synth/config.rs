use std::collections::BTreeMap;

use chrono::NaiveDate;

use super::SynthError;
use crate::claims::{MonthRange, YearMonth, DEFAULT_POPULATION};
use crate::triggers::default_baseline_window;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthKind {
    Exponential,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Linear,
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Exactly `round(fraction · claims)` fraud labels per month.
    Exact,
    /// Independent draws per claim.
    Bernoulli,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpidemicConfig {
    pub kind: GrowthKind,
    /// Month in which the epidemic starts; cumulative count is zero before it.
    pub start: YearMonth,
    /// Cumulative infections at the start of `start`.
    pub initial: f64,
    /// Continuous growth rate per month: `C(t) = initial · e^(rate·t)` for exponential growth.
    pub rate: f64,
    /// Logistic ceiling.
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimsConfig {
    pub per_month: u64,
    /// Fraud fraction of months without new infections.
    pub base_fraud: f64,
    pub link: LinkKind,
    pub link_slope: f64,
    pub link_intercept: f64,
    pub sampling: Sampling,
    /// Probability that an unplanted claim carries a random trigger violation.
    pub natural_rate: f64,
    /// Probability that a fraud claim carries the fraud feature signature.
    pub fraud_signal: f64,
}

/// Rules the generator can plant violations for.
pub const PLANTABLE: &[&str] = &[
    "long_time_off",
    "multiple_providers",
    "high_value_bill",
    "exgratia_threshold",
    "duplicate_package",
    "stale_reject",
    "high_utilization",
    "late_submission",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub months: MonthRange,
    pub population: u64,
    pub region: String,
    pub epidemic: EpidemicConfig,
    pub claims: ClaimsConfig,
    pub evaluation_date: NaiveDate,
    pub baseline: MonthRange,
    /// rule id → per-month plant count; a `None` month applies to every month.
    pub plants: BTreeMap<String, BTreeMap<Option<YearMonth>, u64>>,
}

fn ym(y: i32, m: u32) -> YearMonth {
    YearMonth::new(y, m).expect("valid month")
}

impl Default for SynthConfig {
    fn default() -> Self {
        let months = MonthRange::new(ym(2019, 8), ym(2020, 8));
        Self {
            seed: 42,
            months,
            population: DEFAULT_POPULATION,
            region: "study_region".into(),
            epidemic: EpidemicConfig {
                kind: GrowthKind::Exponential,
                start: ym(2020, 3),
                initial: 10.0,
                rate: 1.43,
                capacity: DEFAULT_POPULATION as f64,
            },
            claims: ClaimsConfig {
                per_month: 1000,
                base_fraud: 0.0796,
                link: LinkKind::Linear,
                link_slope: 5.4124,
                link_intercept: 0.0796,
                sampling: Sampling::Exact,
                natural_rate: 0.0,
                fraud_signal: 0.9,
            },
            evaluation_date: months.to.last_day(),
            baseline: default_baseline_window(),
            plants: BTreeMap::new(),
        }
    }
}

impl SynthConfig {
    /// Plant count for `rule` in `month`; a month-specific entry overrides the blanket one.
    pub fn plant_count(&self, rule: &str, month: YearMonth) -> u64 {
        self.plants
            .get(rule)
            .and_then(|m| m.get(&Some(month)).or_else(|| m.get(&None)))
            .copied()
            .unwrap_or(0)
    }

    /// Parses `key = value` lines; `#` starts a comment. Unset keys keep their
    /// defaults, except that `claims.link_intercept` defaults to `claims.base_fraud`.
    pub fn parse(text: &str) -> Result<Self, SynthError> {
        let mut cfg = SynthConfig::default();
        let mut intercept_set = false;
        let mut to_set = false;
        let mut eval_set = false;
        let mut capacity_set = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| SynthError::Config {
                key: line.to_string(),
                message: format!("line {}: expected `key = value`", lineno + 1),
            })?;
            let (key, value) = (key.trim(), value.trim());
            let err = |message: String| SynthError::Config {
                key: key.to_string(),
                message,
            };
            macro_rules! num {
                ($t:ty) => {
                    value
                        .parse::<$t>()
                        .map_err(|_| err(format!("invalid value {value:?}")))?
                };
            }
            let finite = |v: f64| {
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(err(format!("value must be finite, got {value}")))
                }
            };
            let fraction = |v: f64| {
                if (0.0..=1.0).contains(&v) {
                    Ok(v)
                } else {
                    Err(err(format!("value must lie in [0, 1], got {value}")))
                }
            };
            let month = || {
                value
                    .parse::<YearMonth>()
                    .map_err(|_| err(format!("invalid month {value:?}, expected YYYY-MM")))
            };
            match key {
                "seed" => cfg.seed = num!(u64),
                "from" => cfg.months.from = month()?,
                "to" => {
                    cfg.months.to = month()?;
                    to_set = true;
                }
                "population" => cfg.population = num!(u64),
                "region" => cfg.region = value.to_string(),
                "evaluation_date" => {
                    cfg.evaluation_date = value
                        .parse()
                        .map_err(|_| err(format!("invalid date {value:?}")))?;
                    eval_set = true;
                }
                "baseline_from" => cfg.baseline.from = month()?,
                "baseline_to" => cfg.baseline.to = month()?,
                "epidemic.kind" => {
                    cfg.epidemic.kind = match value {
                        "exponential" => GrowthKind::Exponential,
                        "logistic" => GrowthKind::Logistic,
                        _ => return Err(err(format!("unknown growth kind {value:?}"))),
                    }
                }
                "epidemic.start" => cfg.epidemic.start = month()?,
                "epidemic.initial" => cfg.epidemic.initial = finite(num!(f64))?,
                "epidemic.rate" => cfg.epidemic.rate = finite(num!(f64))?,
                "epidemic.capacity" => {
                    cfg.epidemic.capacity = finite(num!(f64))?;
                    capacity_set = true;
                }
                "claims.per_month" => cfg.claims.per_month = num!(u64),
                "claims.base_fraud" => cfg.claims.base_fraud = fraction(num!(f64))?,
                "claims.link" => {
                    cfg.claims.link = match value {
                        "linear" => LinkKind::Linear,
                        "logarithmic" => LinkKind::Logarithmic,
                        _ => return Err(err(format!("unknown link {value:?}"))),
                    }
                }
                "claims.link_slope" => cfg.claims.link_slope = finite(num!(f64))?,
                "claims.link_intercept" => {
                    cfg.claims.link_intercept = finite(num!(f64))?;
                    intercept_set = true;
                }
                "claims.sampling" => {
                    cfg.claims.sampling = match value {
                        "exact" => Sampling::Exact,
                        "bernoulli" => Sampling::Bernoulli,
                        _ => return Err(err(format!("unknown sampling mode {value:?}"))),
                    }
                }
                "claims.natural_rate" => cfg.claims.natural_rate = fraction(num!(f64))?,
                "claims.fraud_signal" => cfg.claims.fraud_signal = fraction(num!(f64))?,
                _ if key.starts_with("plant.") => {
                    let rest = &key["plant.".len()..];
                    let (rule, month) = match rest.split_once('.') {
                        Some((rule, m)) => (
                            rule,
                            Some(
                                m.parse::<YearMonth>()
                                    .map_err(|_| err(format!("invalid month {m:?} in key")))?,
                            ),
                        ),
                        None => (rest, None),
                    };
                    if !PLANTABLE.contains(&rule) {
                        return Err(err(format!(
                            "cannot plant rule {rule:?}; plantable rules: {}",
                            PLANTABLE.join(", ")
                        )));
                    }
                    cfg.plants
                        .entry(rule.to_string())
                        .or_default()
                        .insert(month, num!(u64));
                }
                _ => return Err(err("unknown configuration key".into())),
            }
        }
        if !intercept_set {
            cfg.claims.link_intercept = cfg.claims.base_fraud;
        }
        if to_set && !eval_set {
            cfg.evaluation_date = cfg.months.to.last_day();
        }
        if !capacity_set {
            cfg.epidemic.capacity = cfg.population as f64;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let err = |key: &str, message: String| SynthError::Config {
            key: key.to_string(),
            message,
        };
        if self.months.is_empty() {
            return Err(SynthError::Usage(format!(
                "month range {}..{} is reversed",
                self.months.from, self.months.to
            )));
        }
        if self.population == 0 {
            return Err(err("population", "population must be positive".into()));
        }
        if self.epidemic.initial < 0.0 {
            return Err(err(
                "epidemic.initial",
                "initial cases cannot be negative".into(),
            ));
        }
        if self.epidemic.rate < 0.0 {
            return Err(err(
                "epidemic.rate",
                "a negative rate would make cumulative counts fall".into(),
            ));
        }
        if self.epidemic.kind == GrowthKind::Logistic
            && self.epidemic.capacity < self.epidemic.initial
        {
            return Err(err(
                "epidemic.capacity",
                "capacity must be at least the initial count".into(),
            ));
        }
        for (rule, months) in &self.plants {
            for month in months.keys().flatten() {
                if !self.months.contains(*month) {
                    return Err(err(
                        &format!("plant.{rule}.{month}"),
                        "month lies outside the generated range".into(),
                    ));
                }
            }
        }
        for month in self.months.months() {
            if self.plant_count("stale_reject", month) > 0 {
                let cutoff = crate::triggers::Duration::Months(3).after(month.last_day());
                if cutoff.is_none_or(|c| c >= self.evaluation_date) {
                    return Err(err(
                        "plant.stale_reject",
                        format!(
                            "claims reported in {month} are not yet 3 months old at evaluation date {}",
                            self.evaluation_date
                        ),
                    ));
                }
            }
            if self.baseline.contains(month)
                && self
                    .plants
                    .get("high_utilization")
                    .is_some_and(|m| m.contains_key(&Some(month)))
            {
                return Err(err(
                    &format!("plant.high_utilization.{month}"),
                    "planting excess inside the baseline window would shift the baseline".into(),
                ));
            }
        }
        if self.plants.contains_key("high_utilization")
            && !(self.months.contains(self.baseline.from) && self.months.contains(self.baseline.to))
        {
            return Err(err(
                "plant.high_utilization",
                "the baseline window must lie inside the generated months".into(),
            ));
        }
        Ok(())
    }

    /// Plants of `rule` in `month`, honoring the rule that blanket high-utilization
    /// plants skip baseline months.
    pub fn effective_plants(&self, rule: &str, month: YearMonth) -> u64 {
        if rule == "high_utilization" && self.baseline.contains(month) {
            return 0;
        }
        self.plant_count(rule, month)
    }

    /// Configured fraud fraction for a month with the given infection rate, clamped to [0, 1].
    pub fn fraud_fraction(&self, covid_rate: f64) -> Result<f64, SynthError> {
        let c = &self.claims;
        if covid_rate <= 0.0 {
            return Ok(c.base_fraud);
        }
        let q = match c.link {
            LinkKind::Linear => c.link_intercept + c.link_slope * covid_rate,
            LinkKind::Logarithmic => c.link_intercept + c.link_slope * covid_rate.ln(),
        };
        if q.is_nan() {
            return Err(SynthError::Config {
                key: "claims.link".into(),
                message: format!("link produced NaN at infection rate {covid_rate}"),
            });
        }
        Ok(q.clamp(0.0, 1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_keys_and_defaults() {
        let cfg = SynthConfig::parse(
            "# demo\nseed = 7\nfrom = 2020-03\nto = 2020-08\nclaims.link = logarithmic\nclaims.link_slope = 0.0118\nclaims.link_intercept = 0.1832\nplant.late_submission = 2\nplant.late_submission.2020-05 = 3\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.claims.link, LinkKind::Logarithmic);
        assert_eq!(cfg.plant_count("late_submission", ym(2020, 5)), 3);
        assert_eq!(cfg.plant_count("late_submission", ym(2020, 4)), 2);
        assert_eq!(cfg.evaluation_date, ym(2020, 8).last_day());
    }

    #[test]
    fn intercept_defaults_to_base_fraud() {
        let cfg = SynthConfig::parse("claims.base_fraud = 0.05\nclaims.link_slope = 0").unwrap();
        assert_eq!(cfg.claims.link_intercept, 0.05);
        assert_eq!(cfg.fraud_fraction(0.01).unwrap(), 0.05);
    }

    #[test]
    fn bad_keys_are_named() {
        for (text, key) in [
            ("bogus = 1", "bogus"),
            ("claims.per_month = -5", "claims.per_month"),
            ("plant.document_tampering = 1", "plant.document_tampering"),
            ("claims.base_fraud = 1.5", "claims.base_fraud"),
        ] {
            match SynthConfig::parse(text) {
                Err(SynthError::Config { key: k, .. }) => assert_eq!(k, key),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn reversed_range_is_usage_error() {
        assert!(matches!(
            SynthConfig::parse("from = 2020-08\nto = 2020-03"),
            Err(SynthError::Usage(_))
        ));
    }

    #[test]
    fn young_stale_plant_rejected() {
        let e = SynthConfig::parse("plant.stale_reject.2020-07 = 1").unwrap_err();
        assert!(matches!(e, SynthError::Config { .. }));
        SynthConfig::parse("plant.stale_reject.2020-03 = 1").unwrap();
    }

    #[test]
    fn link_clamps() {
        let mut cfg = SynthConfig::default();
        cfg.claims.link = LinkKind::Logarithmic;
        cfg.claims.link_slope = 0.0118;
        cfg.claims.link_intercept = 0.1832;
        let q = cfg.fraud_fraction(0.012356667).unwrap();
        assert!((q - (0.1832 + 0.0118 * 0.012356667f64.ln())).abs() < 1e-15);
        cfg.claims.link_slope = 1.0;
        assert_eq!(cfg.fraud_fraction(1e-9).unwrap(), 0.0);
        cfg.claims.link_intercept = f64::INFINITY;
        cfg.claims.link_slope = f64::INFINITY;
        cfg.claims.link = LinkKind::Linear;
        assert_eq!(cfg.fraud_fraction(0.5).unwrap(), 1.0);
        cfg.claims.link = LinkKind::Logarithmic;
        assert!(cfg.fraud_fraction(0.5).is_err());
    }
}
