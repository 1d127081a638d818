//! Reference data set for the published monthly figures. Monthly claim and
//! fraud counts are small-denominator fractions chosen to reproduce the
//! published fraud rates to the precision implied by the published summary
//! statistics; infection counts are the published monthly case counts.

use chrono::{Days, NaiveDate};

use crate::claims::{BenefitType, ClaimRecord, CovidDailyRecord, FraudStatus, Money, YearMonth};

/// (year, month, reported claims, fraud claims)
pub const REFERENCE_MONTHLY_CLAIMS: &[(i32, u32, u64, u64)] = &[
    (2019, 8, 345, 2),
    (2019, 9, 463, 5),
    (2019, 10, 336, 4),
    (2019, 11, 415, 11),
    (2019, 12, 428, 22),
    (2020, 1, 379, 26),
    (2020, 2, 380, 16),
    (2020, 3, 487, 30),
    (2020, 4, 1725, 118),
    (2020, 5, 329, 28),
    (2020, 6, 1304, 129),
    (2020, 7, 1051, 125),
    (2020, 8, 1819, 254),
];

/// Month-end cumulative infections; earlier months have none.
pub const REFERENCE_MONTH_END_CUMULATIVE: &[(i32, u32, u64)] = &[
    (2020, 2, 1),
    (2020, 3, 42),
    (2020, 4, 358),
    (2020, 5, 2234),
    (2020, 6, 5419),
    (2020, 7, 15457),
    (2020, 8, 52527),
];

pub const REFERENCE_REGION: &str = "study_region";

fn ym(y: i32, m: u32) -> YearMonth {
    YearMonth::new(y, m).expect("valid month")
}

/// Evenly spread fraud labels: claim `j` of `n` is fraud when the running
/// share `⌊(j+1)·f/n⌋` steps up.
fn is_fraud(j: u64, n: u64, f: u64) -> bool {
    (j + 1) * f / n > j * f / n
}

pub fn reference_claims() -> Vec<ClaimRecord> {
    let statuses = ["settled", "paid", "open", "under_review"];
    let mut out = Vec::new();
    let mut serial = 0u64;
    for &(y, m, n, f) in REFERENCE_MONTHLY_CLAIMS {
        let month = ym(y, m);
        for j in 0..n {
            serial += 1;
            let s = serial;
            let reported = NaiveDate::from_ymd_opt(y, m, 1 + (j % month.days() as u64) as u32)
                .expect("valid day");
            let raised = reported - Days::new(s % 4);
            let discharge = raised - Days::new(s % 11);
            let days = (s % 9) as u32;
            let start = discharge - Days::new(days as u64);
            let status = statuses[(s % 4) as usize];
            let billed = Money::from_units(5_000 + (s * 7919 % 195_000) as i64);
            let approved = Money::from_minor(billed.minor() / 10 * 9);
            let decided = matches!(status, "settled" | "paid");
            let settlement = decided.then(|| reported + Days::new(1 + s % 20));
            let paid = (status == "paid").then_some(approved);
            out.push(ClaimRecord {
                policy_number: format!("PP{s:06}"),
                insured_id: format!("PI{s:06}"),
                claim_id: format!("P{y}{m:02}-{:05}", j + 1),
                benefit_type: Some(if s.is_multiple_of(3) {
                    BenefitType::Surgical
                } else {
                    BenefitType::Medical
                }),
                claim_status: status.to_string(),
                treatment_start: Some(start),
                treatment_end: Some(discharge),
                claim_settlement_date: settlement,
                claim_reported_date: reported,
                billed_amount: billed,
                approved_amount: decided.then_some(approved),
                paid_amount: paid,
                provider_id: format!("PRV{:03}", 1 + s % 40),
                provider_name: format!("Hospital {:03}", 1 + s % 40),
                days_stayed: days,
                diagnosis_code: format!("DX{:02}", 1 + s % 30),
                diagnosis_name: format!("Diagnosis {:02}", 1 + s % 30),
                procedure_code: format!("PKG{:02}", 1 + s % 20),
                procedure_name: format!("Package {:02}", 1 + s % 20),
                net_amount: paid.or(decided.then_some(approved)),
                claim_paid_date: paid.and(settlement.map(|d| d + Days::new(s % 7))),
                surgery_date: s.is_multiple_of(3).then_some(start),
                discharge_date: Some(discharge),
                claim_raised_date: Some(raised),
                hospital_district: format!("District {:02}", 1 + s % 12),
                fraud_status: if is_fraud(j, n, f) {
                    FraudStatus::Fraud
                } else {
                    FraudStatus::NotFraud
                },
            });
        }
    }
    out
}

/// Daily cumulative counts from 2020-02-01, interpolated linearly within each
/// month and exact at every month end.
pub fn reference_covid() -> Vec<CovidDailyRecord> {
    let mut out = Vec::new();
    let mut prev = 0u64;
    for &(y, m, end) in REFERENCE_MONTH_END_CUMULATIVE {
        let month = ym(y, m);
        let days = month.days() as u64;
        for d in 1..=days {
            out.push(CovidDailyRecord {
                date: NaiveDate::from_ymd_opt(y, m, d as u32).expect("valid day"),
                region: REFERENCE_REGION.to_string(),
                cumulative_infected: prev + (end - prev) * d / days,
            });
        }
        prev = end;
    }
    out
}
