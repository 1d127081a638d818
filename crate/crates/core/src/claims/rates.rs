//! Month-wise fraud and infection rates and their joint series.

use std::io::{Read, Write};

use super::month::{MonthRange, YearMonth};
use super::record::{ClaimRecord, CovidDailyRecord, MonthlyPoint};
use super::DataError;
use crate::format::sig_digits;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonthlyFraud {
    pub reported_claims: u64,
    pub fraud_claims: u64,
    pub fraud_rate: f64,
}

/// Fraud rate of the claims reported in `month`; zero when none were reported.
pub fn monthly_fraud_rate(claims: &[ClaimRecord], month: YearMonth) -> MonthlyFraud {
    let (reported, fraud) = claims
        .iter()
        .filter(|c| month.contains(c.claim_reported_date))
        .fold((0u64, 0u64), |(r, f), c| (r + 1, f + c.is_fraud() as u64));
    MonthlyFraud {
        reported_claims: reported,
        fraud_claims: fraud,
        fraud_rate: if reported == 0 {
            0.0
        } else {
            fraud as f64 / reported as f64
        },
    }
}

/// Cumulative count as of the end of `date_limit` (inclusive); 0 before the first record.
fn cumulative_at(records: &[CovidDailyRecord], date_limit: chrono::NaiveDate) -> u64 {
    let idx = records.partition_point(|r| r.date <= date_limit);
    if idx == 0 {
        0
    } else {
        records[idx - 1].cumulative_infected
    }
}

/// New cases in `month` from a date-sorted cumulative series, and their share of `population`.
pub fn monthly_covid_rate(
    records: &[CovidDailyRecord],
    month: YearMonth,
    population: u64,
) -> Result<(u64, f64), DataError> {
    if population == 0 {
        return Err(DataError::Domain("population must be positive".into()));
    }
    let end = cumulative_at(records, month.last_day());
    let start = cumulative_at(records, month.pred().last_day());
    let cases = end.saturating_sub(start);
    if cases > population {
        return Err(DataError::Domain(format!(
            "{cases} new cases in {month} exceed population {population}"
        )));
    }
    Ok((cases, cases as f64 / population as f64))
}

/// One point per month of `[from, to]`, in order.
pub fn build_joint_series(
    claims: &[ClaimRecord],
    covid: &[CovidDailyRecord],
    population: u64,
    from: YearMonth,
    to: YearMonth,
) -> Result<Vec<MonthlyPoint>, DataError> {
    if from > to {
        return Err(DataError::Usage(format!(
            "month range {from}..{to} is reversed"
        )));
    }
    let mut sorted;
    let covid = if covid.windows(2).all(|w| w[0].date <= w[1].date) {
        covid
    } else {
        sorted = covid.to_vec();
        sorted.sort_by_key(|r| r.date);
        &sorted[..]
    };
    MonthRange::new(from, to)
        .months()
        .map(|month| {
            let fraud = monthly_fraud_rate(claims, month);
            let (covid_cases, covid_rate) = monthly_covid_rate(covid, month, population)?;
            Ok(MonthlyPoint {
                month,
                reported_claims: fraud.reported_claims,
                fraud_claims: fraud.fraud_claims,
                fraud_rate: fraud.fraud_rate,
                covid_cases,
                covid_rate,
            })
        })
        .collect()
}

const MONTHLY_HEADER: [&str; 6] = [
    "month",
    "reported_claims",
    "fraud_claims",
    "fraud_rate",
    "covid_cases",
    "covid_rate",
];

/// Writes the series with rates at 6 significant digits.
pub fn write_monthly_csv<W: Write>(out: W, points: &[MonthlyPoint]) -> Result<(), DataError> {
    let mut writer = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| DataError::Csv(e.to_string());
    writer.write_record(MONTHLY_HEADER).map_err(wrap)?;
    for p in points {
        writer
            .write_record([
                p.month.to_string(),
                p.reported_claims.to_string(),
                p.fraud_claims.to_string(),
                sig_digits(p.fraud_rate, 6),
                p.covid_cases.to_string(),
                sig_digits(p.covid_rate, 6),
            ])
            .map_err(wrap)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a monthly series. Only `month`, `fraud_rate` and `covid_rate` are
/// required; count columns default to 0 when absent.
pub fn read_monthly_csv<R: Read>(stream: R) -> Result<Vec<MonthlyPoint>, DataError> {
    let mut reader = csv::Reader::from_reader(stream);
    let headers = reader
        .headers()
        .map_err(|e| DataError::Csv(e.to_string()))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let need = |name: &str| {
        col(name).ok_or_else(|| DataError::MissingColumn {
            column: name.to_string(),
        })
    };
    let month_c = need("month")?;
    let fraud_c = need("fraud_rate")?;
    let covid_c = need("covid_rate")?;
    let counts = ["reported_claims", "fraud_claims", "covid_cases"].map(col);

    let mut points = Vec::new();
    for (idx, rec) in reader.records().enumerate() {
        let row = idx + 2;
        let rec = rec.map_err(|e| DataError::Csv(e.to_string()))?;
        let cell = |i: usize| rec.get(i).unwrap_or("").trim();
        let bad = |what: &str, v: &str| DataError::Csv(format!("row {row}: invalid {what} {v:?}"));
        let month: YearMonth = cell(month_c)
            .parse()
            .map_err(|_| bad("month", cell(month_c)))?;
        let rate = |i: usize, what: &str| -> Result<f64, DataError> {
            let v: f64 = cell(i).parse().map_err(|_| bad(what, cell(i)))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(bad(what, cell(i)));
            }
            Ok(v)
        };
        let count = |i: Option<usize>, what: &str| -> Result<u64, DataError> {
            match i {
                Some(i) if !cell(i).is_empty() => cell(i).parse().map_err(|_| bad(what, cell(i))),
                _ => Ok(0),
            }
        };
        points.push(MonthlyPoint {
            month,
            reported_claims: count(counts[0], "reported_claims")?,
            fraud_claims: count(counts[1], "fraud_claims")?,
            fraud_rate: rate(fraud_c, "fraud_rate")?,
            covid_cases: count(counts[2], "covid_cases")?,
            covid_rate: rate(covid_c, "covid_rate")?,
        });
    }
    Ok(points)
}
