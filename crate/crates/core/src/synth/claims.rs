use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{Sampling, SynthConfig};
use super::SynthError;
use crate::claims::{
    monthly_covid_rate, BenefitType, ClaimRecord, CovidDailyRecord, DataError, FraudStatus, Money,
    YearMonth,
};
use crate::format::sig_digits;

pub const PROCEDURES: usize = 20;
const PROVIDERS: usize = 40;
/// Providers favored by fraudulent claims carrying the fraud signature.
const SUSPICIOUS_PROVIDERS: std::ops::Range<usize> = 35..40;
const DIAGNOSES: usize = 30;
const DISTRICTS: usize = 12;

const STATUSES: &[(&str, u32)] = &[
    ("settled", 40),
    ("paid", 35),
    ("open", 15),
    ("under_review", 10),
];

fn procedure_code(i: usize) -> String {
    format!("PKG{:02}", i + 1)
}

fn provider_id(i: usize) -> String {
    format!("PRV{:03}", i + 1)
}

/// Generator-side view of a claim; dates are materialized at the end so that
/// overrides only need to touch the underlying gaps.
#[derive(Debug, Clone)]
struct Draft {
    claim_id: String,
    policy: String,
    insured: String,
    reported: NaiveDate,
    /// reported − raised
    raise_lag: u64,
    /// raised − discharge
    discharge_gap: u64,
    days: u32,
    surgery_offset: Option<u32>,
    benefit: BenefitType,
    status: &'static str,
    settle_lag: u64,
    paid_lag: u64,
    billed_minor: i64,
    approve_ratio: f64,
    paid_override: Option<Money>,
    provider: usize,
    diagnosis: usize,
    procedure: usize,
    district: usize,
    fraud: bool,
}

fn sub(d: NaiveDate, n: u64) -> NaiveDate {
    d.checked_sub_days(Days::new(n)).expect("date in range")
}

fn add(d: NaiveDate, n: u64) -> NaiveDate {
    d.checked_add_days(Days::new(n)).expect("date in range")
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> i64 {
    let v = rng.gen_range(lo.ln()..hi.ln()).exp();
    (v * 100.0).round() as i64
}

impl Draft {
    fn materialize(&self) -> ClaimRecord {
        let raised = sub(self.reported, self.raise_lag);
        let discharge = sub(raised, self.discharge_gap);
        let end = discharge;
        let start = sub(end, self.days as u64);
        let billed = Money::from_minor(self.billed_minor);
        let approved =
            Money::from_minor((self.billed_minor as f64 * self.approve_ratio).round() as i64);
        let decided = matches!(self.status, "settled" | "paid");
        let settlement = decided.then(|| add(self.reported, self.settle_lag));
        let (paid, paid_date) = if self.status == "paid" {
            (
                Some(self.paid_override.unwrap_or(approved)),
                settlement.map(|s| add(s, self.paid_lag)),
            )
        } else {
            (None, None)
        };
        ClaimRecord {
            policy_number: self.policy.clone(),
            insured_id: self.insured.clone(),
            claim_id: self.claim_id.clone(),
            benefit_type: Some(self.benefit),
            claim_status: self.status.to_string(),
            treatment_start: Some(start),
            treatment_end: Some(end),
            claim_settlement_date: settlement,
            claim_reported_date: self.reported,
            billed_amount: billed,
            approved_amount: decided.then_some(approved),
            paid_amount: paid,
            provider_id: provider_id(self.provider),
            provider_name: format!("Hospital {:03}", self.provider + 1),
            days_stayed: self.days,
            diagnosis_code: format!("DX{:02}", self.diagnosis + 1),
            diagnosis_name: format!("Diagnosis {:02}", self.diagnosis + 1),
            procedure_code: procedure_code(self.procedure),
            procedure_name: format!("Package {:02}", self.procedure + 1),
            net_amount: paid.or(decided.then_some(approved)),
            claim_paid_date: paid_date,
            surgery_date: self.surgery_offset.map(|o| add(start, o as u64)),
            discharge_date: Some(discharge),
            claim_raised_date: Some(raised),
            hospital_district: format!("District {:02}", self.district + 1),
            fraud_status: if self.fraud {
                FraudStatus::Fraud
            } else {
                FraudStatus::NotFraud
            },
        }
    }
}

/// Per-month generation summary.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthTruth {
    pub month: YearMonth,
    pub claims: u64,
    pub fraud_claims: u64,
    /// Configured fraud fraction after clamping.
    pub fraud_fraction: f64,
    /// `fraud_fraction · claims`
    pub expected_fraud: f64,
    pub covid_cases: u64,
    pub covid_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub rule_id: String,
    pub month: YearMonth,
    pub claim_id: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroundTruth {
    pub months: Vec<MonthTruth>,
    pub fraud_ids: BTreeMap<YearMonth, Vec<String>>,
    /// Violations planted on request, sorted.
    pub planted: Vec<Violation>,
    /// Random violations from `claims.natural_rate`, sorted.
    pub natural: Vec<Violation>,
}

impl GroundTruth {
    pub fn planted_ids(&self) -> BTreeSet<String> {
        self.planted.iter().map(|v| v.claim_id.clone()).collect()
    }

    pub fn planted_for(&self, rule: &str) -> BTreeSet<String> {
        self.planted
            .iter()
            .filter(|v| v.rule_id == rule)
            .map(|v| v.claim_id.clone())
            .collect()
    }
}

/// Hands out unused base-claim indices for plants.
struct Allocator {
    used: Vec<bool>,
}

impl Allocator {
    /// First index `i` such that every `i + step·j` (j < count) is free.
    fn take(&mut self, count: usize, step: usize) -> Option<Vec<usize>> {
        let n = self.used.len();
        let span = step * (count - 1);
        (0..n.saturating_sub(span)).find_map(|i| {
            let idx: Vec<usize> = (0..count).map(|j| i + step * j).collect();
            if idx.iter().all(|&k| !self.used[k]) {
                idx.iter().for_each(|&k| self.used[k] = true);
                Some(idx)
            } else {
                None
            }
        })
    }
}

fn apply_override(rule: &str, group: &[usize], drafts: &mut [Draft], rng: &mut ChaCha8Rng) {
    match rule {
        "long_time_off" => drafts[group[0]].days = rng.gen_range(31..=60),
        "high_value_bill" => drafts[group[0]].billed_minor = log_uniform(rng, 600_000.0, 900_000.0),
        "exgratia_threshold" => {
            let d = &mut drafts[group[0]];
            d.billed_minor = 40_000_000;
            d.approve_ratio = 1.0;
            d.status = "paid";
            d.paid_override = Some(Money::from_units(1_200_000));
        }
        "late_submission" => drafts[group[0]].discharge_gap = rng.gen_range(16..=40),
        "stale_reject" => drafts[group[0]].status = "rejected",
        "duplicate_package" => {
            let insured = drafts[group[0]].insured.clone();
            drafts[group[1]].insured = insured;
        }
        "multiple_providers" => {
            let insured = drafts[group[0]].insured.clone();
            let diagnosis = drafts[group[0]].diagnosis;
            let first = rng.gen_range(0..PROVIDERS);
            for (j, &i) in group.iter().enumerate() {
                drafts[i].insured = insured.clone();
                drafts[i].diagnosis = diagnosis;
                drafts[i].provider = (first + j) % PROVIDERS;
            }
        }
        other => unreachable!("no override for {other}"),
    }
}

/// Rows of the plant request: (claims per violation, index step between them).
fn plant_shape(rule: &str) -> (usize, usize) {
    match rule {
        "duplicate_package" => (2, PROCEDURES),
        "multiple_providers" => (3, 1),
        _ => (1, 1),
    }
}

const NATURAL_RULES: &[&str] = &[
    "long_time_off",
    "high_value_bill",
    "exgratia_threshold",
    "late_submission",
];

/// Generates the claim corpus for `epidemic`, which must cover the configured months.
pub fn generate_claims(
    cfg: &SynthConfig,
    epidemic: &[CovidDailyRecord],
) -> Result<(Vec<ClaimRecord>, GroundTruth), SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::new();
    let mut truth = GroundTruth::default();
    let mut serial: u64 = 0;
    let n_base = cfg.claims.per_month as usize;

    for (month_index, month) in cfg.months.months().enumerate() {
        let (covid_cases, covid_rate) = monthly_covid_rate(epidemic, month, cfg.population)
            .map_err(|e| match e {
                DataError::Domain(m) => SynthError::Config {
                    key: "population".into(),
                    message: m,
                },
                other => SynthError::Data(other.to_string()),
            })?;
        let q = cfg.fraud_fraction(covid_rate)?;

        let mut drafts = Vec::with_capacity(n_base);
        let extras = cfg.effective_plants("high_utilization", month) as usize;
        for seq in 0..n_base + extras {
            serial += 1;
            let is_extra = seq >= n_base;
            let day = if is_extra {
                month.days()
            } else {
                rng.gen_range(1..=month.days())
            };
            let surgical = rng.gen_bool(0.5);
            let days: u32 = rng.gen_range(0..=10);
            let status = {
                let total: u32 = STATUSES.iter().map(|s| s.1).sum();
                let mut pick = rng.gen_range(0..total);
                STATUSES
                    .iter()
                    .find(|s| {
                        if pick < s.1 {
                            true
                        } else {
                            pick -= s.1;
                            false
                        }
                    })
                    .expect("weights cover range")
                    .0
            };
            drafts.push(Draft {
                claim_id: format!("C{}{:02}-{:05}", month.year(), month.month(), seq + 1),
                policy: format!("POL{serial:07}"),
                insured: format!("INS{serial:07}"),
                reported: NaiveDate::from_ymd_opt(month.year(), month.month(), day)
                    .expect("valid day"),
                raise_lag: rng.gen_range(0..=3),
                discharge_gap: rng.gen_range(0..=10),
                days,
                surgery_offset: surgical.then(|| rng.gen_range(0..=days)),
                benefit: if surgical {
                    BenefitType::Surgical
                } else {
                    BenefitType::Medical
                },
                status,
                settle_lag: rng.gen_range(1..=30),
                paid_lag: rng.gen_range(0..=10),
                billed_minor: log_uniform(&mut rng, 5_000.0, 200_000.0),
                approve_ratio: rng.gen_range(0.7..1.0),
                paid_override: None,
                provider: rng.gen_range(0..PROVIDERS),
                diagnosis: rng.gen_range(0..DIAGNOSES),
                procedure: if is_extra {
                    month_index % PROCEDURES
                } else {
                    seq % PROCEDURES
                },
                district: rng.gen_range(0..DISTRICTS),
                fraud: false,
            });
        }
        let total = drafts.len();

        // Labels.
        let fraud_count = match cfg.claims.sampling {
            Sampling::Exact => {
                let k = ((q * total as f64).round() as usize).min(total);
                let mut idx: Vec<usize> = (0..total).collect();
                idx.shuffle(&mut rng);
                for &i in &idx[..k] {
                    drafts[i].fraud = true;
                }
                k
            }
            Sampling::Bernoulli => {
                let mut k = 0;
                for d in drafts.iter_mut() {
                    if rng.gen_bool(q) {
                        d.fraud = true;
                        k += 1;
                    }
                }
                k
            }
        };

        // Fraud signature, kept clear of every trigger threshold.
        for d in drafts.iter_mut().filter(|d| d.fraud) {
            if rng.gen_bool(cfg.claims.fraud_signal) {
                d.billed_minor = log_uniform(&mut rng, 20_000.0, 450_000.0);
                d.raise_lag = rng.gen_range(10..=40);
                d.days = rng.gen_range(3..=12);
                d.surgery_offset = d.surgery_offset.map(|_| rng.gen_range(0..=d.days));
                if rng.gen_bool(0.7) {
                    d.provider = rng.gen_range(SUSPICIOUS_PROVIDERS);
                }
            }
        }

        // Planted violations on base claims; group rules first so their index patterns fit.
        let mut alloc = Allocator {
            used: vec![false; n_base],
        };
        let group_rules = ["duplicate_package", "multiple_providers"];
        let ordered = group_rules.iter().chain(
            super::config::PLANTABLE
                .iter()
                .filter(|r| !group_rules.contains(r) && **r != "high_utilization"),
        );
        for &rule in ordered {
            let (size, step) = plant_shape(rule);
            for _ in 0..cfg.effective_plants(rule, month) {
                let group = alloc.take(size, step).ok_or_else(|| SynthError::Config {
                    key: format!("plant.{rule}"),
                    message: format!(
                        "not enough claims in {month} to plant every requested violation"
                    ),
                })?;
                apply_override(rule, &group, &mut drafts, &mut rng);
                for &i in &group {
                    truth.planted.push(Violation {
                        rule_id: rule.to_string(),
                        month,
                        claim_id: drafts[i].claim_id.clone(),
                    });
                }
            }
        }
        for d in &drafts[n_base..] {
            truth.planted.push(Violation {
                rule_id: "high_utilization".into(),
                month,
                claim_id: d.claim_id.clone(),
            });
        }

        if cfg.claims.natural_rate > 0.0 {
            for i in 0..n_base {
                if alloc.used[i] || !rng.gen_bool(cfg.claims.natural_rate) {
                    continue;
                }
                let rule = NATURAL_RULES[rng.gen_range(0..NATURAL_RULES.len())];
                apply_override(rule, &[i], &mut drafts, &mut rng);
                truth.natural.push(Violation {
                    rule_id: rule.to_string(),
                    month,
                    claim_id: drafts[i].claim_id.clone(),
                });
            }
        }

        let mut fraud_ids: Vec<String> = drafts
            .iter()
            .filter(|d| d.fraud)
            .map(|d| d.claim_id.clone())
            .collect();
        fraud_ids.sort();
        truth.fraud_ids.insert(month, fraud_ids);
        truth.months.push(MonthTruth {
            month,
            claims: total as u64,
            fraud_claims: fraud_count as u64,
            fraud_fraction: q,
            expected_fraud: q * total as f64,
            covid_cases,
            covid_rate,
        });
        out.extend(drafts.iter().map(Draft::materialize));
    }
    truth.planted.sort();
    truth.natural.sort();
    Ok((out, truth))
}

pub fn write_ground_truth_csv<W: Write>(out: W, truth: &GroundTruth) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| DataError::Csv(e.to_string());
    w.write_record(["kind", "month", "rule_id", "claim_id", "value"])
        .map_err(csv_err)?;
    for m in &truth.months {
        let month = m.month.to_string();
        let rows = [
            ("claims", m.claims.to_string()),
            ("fraud_claims", m.fraud_claims.to_string()),
            ("fraud_fraction", sig_digits(m.fraud_fraction, 6)),
            ("expected_fraud", sig_digits(m.expected_fraud, 6)),
            ("covid_cases", m.covid_cases.to_string()),
            ("covid_rate", sig_digits(m.covid_rate, 6)),
        ];
        for (kind, value) in rows {
            w.write_record([kind, month.as_str(), "", "", value.as_str()])
                .map_err(csv_err)?;
        }
        for id in truth.fraud_ids.get(&m.month).into_iter().flatten() {
            w.write_record(["fraud_claim", month.as_str(), "", id.as_str(), ""])
                .map_err(csv_err)?;
        }
    }
    for (kind, list) in [("planted", &truth.planted), ("natural", &truth.natural)] {
        for v in list {
            w.write_record([kind, &v.month.to_string(), &v.rule_id, &v.claim_id, ""])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}
