use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::money::Money;
use super::month::YearMonth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenefitType {
    Medical,
    Surgical,
}

impl BenefitType {
    pub fn as_str(self) -> &'static str {
        match self {
            BenefitType::Medical => "medical",
            BenefitType::Surgical => "surgical",
        }
    }
}

impl FromStr for BenefitType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "medical" => Ok(BenefitType::Medical),
            "surgical" => Ok(BenefitType::Surgical),
            other => Err(format!("unknown benefit type {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FraudStatus {
    Fraud,
    NotFraud,
    Unknown,
}

impl FraudStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FraudStatus::Fraud => "fraud",
            FraudStatus::NotFraud => "not_fraud",
            FraudStatus::Unknown => "unknown",
        }
    }

    /// 1 for fraud, 0 for not-fraud, `None` when unlabeled.
    pub fn label(self) -> Option<u8> {
        match self {
            FraudStatus::Fraud => Some(1),
            FraudStatus::NotFraud => Some(0),
            FraudStatus::Unknown => None,
        }
    }
}

impl FromStr for FraudStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .to_ascii_lowercase()
            .chars()
            .map(|c| if c == '-' || c == ' ' { '_' } else { c })
            .collect();
        match norm.as_str() {
            "fraud" | "1" | "yes" | "y" => Ok(FraudStatus::Fraud),
            "not_fraud" | "non_fraud" | "notfraud" | "0" | "no" | "n" => Ok(FraudStatus::NotFraud),
            "unknown" | "" => Ok(FraudStatus::Unknown),
            _ => Err(format!("unknown fraud status {s:?}")),
        }
    }
}

/// One health-insurance claim.
///
/// Fields that real exports frequently leave blank are optional; the claim id,
/// reported date and fraud status are always present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimRecord {
    pub policy_number: String,
    pub insured_id: String,
    pub claim_id: String,
    pub benefit_type: Option<BenefitType>,
    pub claim_status: String,
    pub treatment_start: Option<NaiveDate>,
    pub treatment_end: Option<NaiveDate>,
    pub claim_settlement_date: Option<NaiveDate>,
    pub claim_reported_date: NaiveDate,
    pub billed_amount: Money,
    pub approved_amount: Option<Money>,
    pub paid_amount: Option<Money>,
    pub provider_id: String,
    pub provider_name: String,
    pub days_stayed: u32,
    pub diagnosis_code: String,
    pub diagnosis_name: String,
    pub procedure_code: String,
    pub procedure_name: String,
    pub net_amount: Option<Money>,
    pub claim_paid_date: Option<NaiveDate>,
    pub surgery_date: Option<NaiveDate>,
    pub discharge_date: Option<NaiveDate>,
    pub claim_raised_date: Option<NaiveDate>,
    pub hospital_district: String,
    pub fraud_status: FraudStatus,
}

impl ClaimRecord {
    pub fn reported_month(&self) -> YearMonth {
        YearMonth::of(self.claim_reported_date)
    }

    pub fn is_fraud(&self) -> bool {
        self.fraud_status == FraudStatus::Fraud
    }

    pub fn value(&self, field: ClaimField) -> FieldValue<'_> {
        use ClaimField as F;
        match field {
            F::PolicyNumber => FieldValue::Text(&self.policy_number),
            F::InsuredId => FieldValue::Text(&self.insured_id),
            F::ClaimId => FieldValue::Text(&self.claim_id),
            F::BenefitType => FieldValue::Category(self.benefit_type.map(BenefitType::as_str)),
            F::ClaimStatus => FieldValue::Text(&self.claim_status),
            F::TreatmentStart => FieldValue::Date(self.treatment_start),
            F::TreatmentEnd => FieldValue::Date(self.treatment_end),
            F::ClaimSettlementDate => FieldValue::Date(self.claim_settlement_date),
            F::ClaimReportedDate => FieldValue::Date(Some(self.claim_reported_date)),
            F::BilledAmount => FieldValue::Money(Some(self.billed_amount)),
            F::ApprovedAmount => FieldValue::Money(self.approved_amount),
            F::PaidAmount => FieldValue::Money(self.paid_amount),
            F::ProviderId => FieldValue::Text(&self.provider_id),
            F::ProviderName => FieldValue::Text(&self.provider_name),
            F::DaysStayed => FieldValue::Integer(Some(self.days_stayed as i64)),
            F::DiagnosisCode => FieldValue::Text(&self.diagnosis_code),
            F::DiagnosisName => FieldValue::Text(&self.diagnosis_name),
            F::ProcedureCode => FieldValue::Text(&self.procedure_code),
            F::ProcedureName => FieldValue::Text(&self.procedure_name),
            F::NetAmount => FieldValue::Money(self.net_amount),
            F::ClaimPaidDate => FieldValue::Date(self.claim_paid_date),
            F::SurgeryDate => FieldValue::Date(self.surgery_date),
            F::DischargeDate => FieldValue::Date(self.discharge_date),
            F::ClaimRaisedDate => FieldValue::Date(self.claim_raised_date),
            F::HospitalDistrict => FieldValue::Text(&self.hospital_district),
            F::FraudStatus => FieldValue::Category(Some(self.fraud_status.as_str())),
        }
    }
}

/// A borrowed view of one claim field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldValue<'a> {
    Text(&'a str),
    Category(Option<&'static str>),
    Date(Option<NaiveDate>),
    Money(Option<Money>),
    Integer(Option<i64>),
}

impl FieldValue<'_> {
    /// Text rendering used for CSV output and cross-claim keys; empty when absent.
    pub fn render(&self) -> String {
        match self {
            FieldValue::Text(s) => s.to_string(),
            FieldValue::Category(c) => c.unwrap_or("").to_string(),
            FieldValue::Date(d) => d.map(|d| d.to_string()).unwrap_or_default(),
            FieldValue::Money(m) => m.map(|m| m.to_string()).unwrap_or_default(),
            FieldValue::Integer(i) => i.map(|i| i.to_string()).unwrap_or_default(),
        }
    }

    pub fn is_missing(&self) -> bool {
        match self {
            FieldValue::Text(s) => s.is_empty(),
            FieldValue::Category(c) => c.is_none(),
            FieldValue::Date(d) => d.is_none(),
            FieldValue::Money(m) => m.is_none(),
            FieldValue::Integer(i) => i.is_none(),
        }
    }
}

/// Storage class of a claim field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Text,
    Category,
    Date,
    Money,
    Integer,
}

macro_rules! claim_fields {
    ($($variant:ident => $name:literal, $display:literal, $kind:ident;)*) => {
        /// The claim columns, in canonical order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum ClaimField {
            $($variant,)*
        }

        impl ClaimField {
            pub const ALL: &'static [ClaimField] = &[$(ClaimField::$variant,)*];

            /// Canonical snake_case column name.
            pub fn name(self) -> &'static str {
                match self {
                    $(ClaimField::$variant => $name,)*
                }
            }

            /// Column title as printed in the source data dictionary.
            pub fn display_name(self) -> &'static str {
                match self {
                    $(ClaimField::$variant => $display,)*
                }
            }

            pub fn kind(self) -> FieldKind {
                match self {
                    $(ClaimField::$variant => FieldKind::$kind,)*
                }
            }

            pub fn from_name(name: &str) -> Option<ClaimField> {
                match name {
                    $($name => Some(ClaimField::$variant),)*
                    _ => None,
                }
            }
        }
    };
}

claim_fields! {
    PolicyNumber => "policy_number", "Policy Number", Text;
    InsuredId => "insured_id", "Insured Id", Text;
    ClaimId => "claim_id", "Claim Identification Number", Text;
    BenefitType => "benefit_type", "Benefit Type", Category;
    ClaimStatus => "claim_status", "Claim Status", Text;
    TreatmentStart => "treatment_start", "Treatment Start Date", Date;
    TreatmentEnd => "treatment_end", "Treatment End Date", Date;
    ClaimSettlementDate => "claim_settlement_date", "Claim Settlement Date", Date;
    ClaimReportedDate => "claim_reported_date", "Claim Reported Date", Date;
    BilledAmount => "billed_amount", "Claim Billed Amount", Money;
    ApprovedAmount => "approved_amount", "Approved / Allowed Amount", Money;
    PaidAmount => "paid_amount", "Claim Paid Amount", Money;
    ProviderId => "provider_id", "Medical Service Provider ID", Text;
    ProviderName => "provider_name", "Medical Service Provider Name", Text;
    DaysStayed => "days_stayed", "No of Days Stayed", Integer;
    DiagnosisCode => "diagnosis_code", "Primary Diagnosis Code", Text;
    DiagnosisName => "diagnosis_name", "Primary Diagnosis Name", Text;
    ProcedureCode => "procedure_code", "Primary Procedure Code", Text;
    ProcedureName => "procedure_name", "Primary Procedure Name", Text;
    NetAmount => "net_amount", "Net Amt", Money;
    ClaimPaidDate => "claim_paid_date", "Claim Paid Date", Date;
    SurgeryDate => "surgery_date", "Surgery Date", Date;
    DischargeDate => "discharge_date", "Discharge Date", Date;
    ClaimRaisedDate => "claim_raised_date", "Claim Raised Date", Date;
    HospitalDistrict => "hospital_district", "Hospital District", Text;
    FraudStatus => "fraud_status", "Fraud Status", Category;
}

impl ClaimField {
    /// Whether the field may be absent on a loaded record.
    pub fn is_optional(self) -> bool {
        use ClaimField as F;
        matches!(
            self,
            F::BenefitType
                | F::TreatmentStart
                | F::TreatmentEnd
                | F::ClaimSettlementDate
                | F::ApprovedAmount
                | F::PaidAmount
                | F::NetAmount
                | F::ClaimPaidDate
                | F::SurgeryDate
                | F::DischargeDate
                | F::ClaimRaisedDate
        )
    }
}

impl Serialize for ClaimField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ClaimField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        ClaimField::from_name(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown claim field {name:?}")))
    }
}

impl fmt::Display for ClaimField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Daily cumulative infection count for one region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CovidDailyRecord {
    pub date: NaiveDate,
    pub region: String,
    pub cumulative_infected: u64,
}

/// Joined monthly fraud and infection rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonthlyPoint {
    pub month: YearMonth,
    pub reported_claims: u64,
    pub fraud_claims: u64,
    pub fraud_rate: f64,
    pub covid_cases: u64,
    pub covid_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

/// A problem found while loading a file. `row` counts file lines with the header as row 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub row: u64,
    pub field: String,
    pub severity: Severity,
    pub message: String,
}

impl ValidationIssue {
    pub fn error(row: u64, field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            row,
            field: field.into(),
            severity: Severity::Error,
            message: message.into(),
        }
    }

    pub fn warning(row: u64, field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            row,
            field: field.into(),
            severity: Severity::Warning,
            message: message.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_roster_is_complete() {
        assert_eq!(ClaimField::ALL.len(), 26);
        for f in ClaimField::ALL {
            assert_eq!(ClaimField::from_name(f.name()), Some(*f));
        }
    }

    #[test]
    fn fraud_status_spellings() {
        assert_eq!("Fraud".parse::<FraudStatus>().unwrap(), FraudStatus::Fraud);
        assert_eq!(
            "not-fraud".parse::<FraudStatus>().unwrap(),
            FraudStatus::NotFraud
        );
        assert_eq!(
            "Not Fraud".parse::<FraudStatus>().unwrap(),
            FraudStatus::NotFraud
        );
        assert_eq!("".parse::<FraudStatus>().unwrap(), FraudStatus::Unknown);
        assert!("maybe".parse::<FraudStatus>().is_err());
    }
}
