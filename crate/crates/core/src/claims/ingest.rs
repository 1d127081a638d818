//! CSV loading and writing for claims and daily infection counts.

use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::NaiveDate;

use super::money::Money;
use super::record::{ClaimField, ClaimRecord, CovidDailyRecord, ValidationIssue};
use super::DataError;

const MANDATORY: [ClaimField; 3] = [
    ClaimField::ClaimId,
    ClaimField::ClaimReportedDate,
    ClaimField::FraudStatus,
];

/// Maps canonical field names to the column titles used by a particular export.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaMap {
    columns: HashMap<ClaimField, String>,
}

impl SchemaMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Mapping for exports that use the data-dictionary column titles.
    pub fn display_names() -> Self {
        let columns = ClaimField::ALL
            .iter()
            .map(|f| (*f, f.display_name().to_string()))
            .collect();
        Self { columns }
    }

    pub fn insert(&mut self, field: ClaimField, source: impl Into<String>) {
        self.columns.insert(field, source.into());
    }

    pub fn source_for(&self, field: ClaimField) -> &str {
        self.columns
            .get(&field)
            .map(String::as_str)
            .unwrap_or(field.name())
    }

    /// Parses `canonical = source_column` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, DataError> {
        let mut map = SchemaMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |message: String| DataError::SchemaMap {
                line: idx + 1,
                message,
            };
            let (canonical, source) = line
                .split_once('=')
                .ok_or_else(|| bad("expected `canonical = source_column`".into()))?;
            let field = ClaimField::from_name(canonical.trim())
                .ok_or_else(|| bad(format!("unknown field {:?}", canonical.trim())))?;
            let source = source.trim();
            if source.is_empty() {
                return Err(bad(format!("empty source column for {field}")));
            }
            map.insert(field, source);
        }
        Ok(map)
    }
}

fn csv_error(err: csv::Error) -> DataError {
    if err.is_io_error() {
        match err.into_kind() {
            csv::ErrorKind::Io(io) => DataError::Io(io),
            other => DataError::Csv(format!("{other:?}")),
        }
    } else {
        DataError::Csv(err.to_string())
    }
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|_| format!("invalid date {s:?}, expected YYYY-MM-DD"))
}

/// Per-row field accessor that accumulates issues.
struct RowReader<'a> {
    row: u64,
    record: &'a csv::StringRecord,
    positions: &'a HashMap<ClaimField, usize>,
    issues: Vec<ValidationIssue>,
    failed: bool,
}

impl<'a> RowReader<'a> {
    fn raw(&self, field: ClaimField) -> &'a str {
        self.positions
            .get(&field)
            .and_then(|&i| self.record.get(i))
            .map(str::trim)
            .unwrap_or("")
    }

    fn error(&mut self, field: ClaimField, message: impl Into<String>) {
        self.failed = true;
        self.issues
            .push(ValidationIssue::error(self.row, field.name(), message));
    }

    fn warn(&mut self, field: ClaimField, message: impl Into<String>) {
        self.issues
            .push(ValidationIssue::warning(self.row, field.name(), message));
    }

    fn text(&self, field: ClaimField) -> String {
        self.raw(field).to_string()
    }

    fn required_text(&mut self, field: ClaimField) -> String {
        let v = self.raw(field);
        if v.is_empty() {
            self.error(field, "value is required");
        }
        v.to_string()
    }

    fn optional_date(&mut self, field: ClaimField) -> Option<NaiveDate> {
        let v = self.raw(field);
        if v.is_empty() {
            return None;
        }
        match parse_date(v) {
            Ok(d) => Some(d),
            Err(e) => {
                self.error(field, e);
                None
            }
        }
    }

    fn required_date(&mut self, field: ClaimField) -> Option<NaiveDate> {
        if self.raw(field).is_empty() {
            self.error(field, "value is required");
            return None;
        }
        self.optional_date(field)
    }

    fn optional_money(&mut self, field: ClaimField, allow_negative: bool) -> Option<Money> {
        let v = self.raw(field);
        if v.is_empty() {
            return None;
        }
        match Money::from_str(v) {
            Ok(m) if m.is_negative() && !allow_negative => {
                self.error(field, format!("amount {v} is negative"));
                None
            }
            Ok(m) => Some(m),
            Err(e) => {
                self.error(field, e.to_string());
                None
            }
        }
    }

    fn parsed<T: FromStr<Err = String>>(&mut self, field: ClaimField) -> Option<T> {
        let v = self.raw(field);
        if v.is_empty() {
            return None;
        }
        match v.parse() {
            Ok(t) => Some(t),
            Err(e) => {
                self.error(field, e);
                None
            }
        }
    }
}

fn read_claim(r: &mut RowReader<'_>) -> Option<ClaimRecord> {
    use ClaimField as F;

    let claim_id = r.required_text(F::ClaimId);
    let claim_reported_date = r.required_date(F::ClaimReportedDate);
    let fraud_status = match r.raw(F::FraudStatus).parse() {
        Ok(s) => Some(s),
        Err(e) => {
            r.error(F::FraudStatus, e);
            None
        }
    };
    let benefit_type = r.parsed(F::BenefitType);
    let treatment_start = r.optional_date(F::TreatmentStart);
    let treatment_end = r.optional_date(F::TreatmentEnd);
    let claim_settlement_date = r.optional_date(F::ClaimSettlementDate);
    let claim_paid_date = r.optional_date(F::ClaimPaidDate);
    let surgery_date = r.optional_date(F::SurgeryDate);
    let discharge_date = r.optional_date(F::DischargeDate);
    let claim_raised_date = r.optional_date(F::ClaimRaisedDate);

    let billed_amount = if r.raw(F::BilledAmount).is_empty() {
        r.warn(F::BilledAmount, "billed amount missing, treated as 0.00");
        Some(Money::ZERO)
    } else {
        r.optional_money(F::BilledAmount, false)
    };
    let approved_amount = r.optional_money(F::ApprovedAmount, false);
    let paid_amount = r.optional_money(F::PaidAmount, false);
    let net_amount = r.optional_money(F::NetAmount, true);

    let days_stayed = match r.raw(F::DaysStayed) {
        "" => Some(0),
        v => match v.parse::<u32>() {
            Ok(d) => Some(d),
            Err(_) => {
                r.error(F::DaysStayed, format!("invalid day count {v:?}"));
                None
            }
        },
    };

    if let (Some(start), Some(end)) = (treatment_start, treatment_end) {
        if end < start {
            r.error(
                F::TreatmentEnd,
                format!("treatment ends {end} before it starts {start}"),
            );
        }
    }
    if let (Some(billed), Some(approved)) = (billed_amount, approved_amount) {
        if approved > billed {
            r.warn(
                F::ApprovedAmount,
                format!("approved {approved} exceeds billed {billed}"),
            );
        }
    }
    if let (Some(approved), Some(paid)) = (approved_amount, paid_amount) {
        if paid > approved {
            r.warn(
                F::PaidAmount,
                format!("paid {paid} exceeds approved {approved}"),
            );
        }
    }

    if r.failed {
        return None;
    }
    Some(ClaimRecord {
        policy_number: r.text(F::PolicyNumber),
        insured_id: r.text(F::InsuredId),
        claim_id,
        benefit_type,
        claim_status: r.text(F::ClaimStatus),
        treatment_start,
        treatment_end,
        claim_settlement_date,
        claim_reported_date: claim_reported_date?,
        billed_amount: billed_amount?,
        approved_amount,
        paid_amount,
        provider_id: r.text(F::ProviderId),
        provider_name: r.text(F::ProviderName),
        days_stayed: days_stayed?,
        diagnosis_code: r.text(F::DiagnosisCode),
        diagnosis_name: r.text(F::DiagnosisName),
        procedure_code: r.text(F::ProcedureCode),
        procedure_name: r.text(F::ProcedureName),
        net_amount,
        claim_paid_date,
        surgery_date,
        discharge_date,
        claim_raised_date,
        hospital_district: r.text(F::HospitalDistrict),
        fraud_status: fraud_status?,
    })
}

/// Loads claims from CSV. Rows with error-severity issues are skipped; all
/// other rows are returned in input order.
pub fn parse_claims_csv<R: Read>(
    stream: R,
    schema_map: Option<&SchemaMap>,
) -> Result<(Vec<ClaimRecord>, Vec<ValidationIssue>), DataError> {
    let default_map = SchemaMap::new();
    let map = schema_map.unwrap_or(&default_map);
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::None)
        .from_reader(stream);
    let headers = reader.headers().map_err(csv_error)?.clone();
    let titles: Vec<&str> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| {
            if i == 0 {
                h.trim_start_matches('\u{feff}').trim()
            } else {
                h.trim()
            }
        })
        .collect();

    let mut positions = HashMap::new();
    for field in ClaimField::ALL {
        let source = map.source_for(*field);
        if let Some(pos) = titles.iter().position(|t| *t == source) {
            positions.insert(*field, pos);
        }
    }
    for field in MANDATORY {
        if !positions.contains_key(&field) {
            return Err(DataError::MissingColumn {
                column: map.source_for(field).to_string(),
            });
        }
    }

    let mut records = Vec::new();
    let mut issues = Vec::new();
    let mut seen = HashSet::new();
    for (idx, result) in reader.records().enumerate() {
        let row = idx as u64 + 2;
        let record = match result {
            Ok(r) => r,
            Err(e) if e.is_io_error() => return Err(csv_error(e)),
            Err(e) => {
                issues.push(ValidationIssue::error(
                    row,
                    "",
                    format!("unreadable row: {e}"),
                ));
                continue;
            }
        };
        if record.len() > titles.len() {
            issues.push(ValidationIssue::error(
                row,
                "",
                format!(
                    "row has {} cells but header has {}",
                    record.len(),
                    titles.len()
                ),
            ));
            continue;
        }
        let mut rr = RowReader {
            row,
            record: &record,
            positions: &positions,
            issues: Vec::new(),
            failed: false,
        };
        let parsed = read_claim(&mut rr);
        let mut row_issues = rr.issues;
        if let Some(claim) = parsed {
            if seen.insert(claim.claim_id.clone()) {
                records.push(claim);
            } else {
                row_issues.push(ValidationIssue::error(
                    row,
                    ClaimField::ClaimId.name(),
                    format!("duplicate claim_id {:?}", claim.claim_id),
                ));
            }
        }
        issues.extend(row_issues);
    }
    Ok((records, issues))
}

/// Writes claims with the canonical header.
pub fn write_claims_csv<W: Write>(out: W, claims: &[ClaimRecord]) -> Result<(), DataError> {
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record(ClaimField::ALL.iter().map(|f| f.name()))
        .map_err(csv_error)?;
    for claim in claims {
        writer
            .write_record(ClaimField::ALL.iter().map(|f| claim.value(*f).render()))
            .map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// Loads the rows of one region, sorted by date. A decrease in the cumulative
/// count is clamped to the previous value with a warning.
pub fn parse_covid_csv<R: Read>(
    stream: R,
    region: &str,
) -> Result<(Vec<CovidDailyRecord>, Vec<ValidationIssue>), DataError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(stream);
    let headers = reader.headers().map_err(csv_error)?.clone();
    let find = |name: &str| -> Result<usize, DataError> {
        headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}').trim() == name)
            .ok_or_else(|| DataError::MissingColumn {
                column: name.to_string(),
            })
    };
    let date_col = find("date")?;
    let region_col = find("region")?;
    let count_col = find("cumulative_infected")?;

    let mut rows: Vec<(u64, CovidDailyRecord)> = Vec::new();
    let mut issues = Vec::new();
    let mut matched = false;
    for (idx, result) in reader.records().enumerate() {
        let row = idx as u64 + 2;
        let record = match result {
            Ok(r) => r,
            Err(e) if e.is_io_error() => return Err(csv_error(e)),
            Err(e) => {
                issues.push(ValidationIssue::error(
                    row,
                    "",
                    format!("unreadable row: {e}"),
                ));
                continue;
            }
        };
        let cell = |i: usize| record.get(i).map(str::trim).unwrap_or("");
        if cell(region_col) != region {
            continue;
        }
        matched = true;
        let date = match parse_date(cell(date_col)) {
            Ok(d) => d,
            Err(e) => {
                issues.push(ValidationIssue::error(row, "date", e));
                continue;
            }
        };
        let count = match cell(count_col).replace(',', "").parse::<u64>() {
            Ok(c) => c,
            Err(_) => {
                issues.push(ValidationIssue::error(
                    row,
                    "cumulative_infected",
                    format!("invalid count {:?}", cell(count_col)),
                ));
                continue;
            }
        };
        rows.push((
            row,
            CovidDailyRecord {
                date,
                region: region.to_string(),
                cumulative_infected: count,
            },
        ));
    }
    if !matched {
        return Err(DataError::NoRegionMatch {
            region: region.to_string(),
        });
    }

    rows.sort_by_key(|(_, r)| r.date);
    let mut previous = 0u64;
    let mut records = Vec::with_capacity(rows.len());
    for (row, mut rec) in rows {
        if rec.cumulative_infected < previous {
            issues.push(ValidationIssue::warning(
                row,
                "cumulative_infected",
                format!(
                    "cumulative count fell from {previous} to {}; clamped",
                    rec.cumulative_infected
                ),
            ));
            rec.cumulative_infected = previous;
        }
        previous = rec.cumulative_infected;
        records.push(rec);
    }
    issues.sort_by_key(|i| i.row);
    Ok((records, issues))
}

pub fn write_covid_csv<W: Write>(out: W, records: &[CovidDailyRecord]) -> Result<(), DataError> {
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record(["date", "region", "cumulative_infected"])
        .map_err(csv_error)?;
    for r in records {
        writer
            .write_record([
                r.date.to_string(),
                r.region.clone(),
                r.cumulative_infected.to_string(),
            ])
            .map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes issues as `row,field,severity,message` CSV.
pub fn write_issues_csv<W: Write>(out: W, issues: &[ValidationIssue]) -> Result<(), DataError> {
    let mut writer = csv::Writer::from_writer(out);
    writer
        .write_record(["row", "field", "severity", "message"])
        .map_err(csv_error)?;
    for i in issues {
        writer
            .write_record([
                i.row.to_string(),
                i.field.clone(),
                i.severity.as_str().to_string(),
                i.message.clone(),
            ])
            .map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}
