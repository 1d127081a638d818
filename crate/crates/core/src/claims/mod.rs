//! Claims and infection data: domain types, CSV ingestion and monthly rates.

mod ingest;
mod money;
mod month;
mod rates;
mod record;

pub use ingest::{
    parse_claims_csv, parse_covid_csv, write_claims_csv, write_covid_csv, write_issues_csv,
    SchemaMap,
};
pub use money::{Money, MoneyParseError};
pub use month::{MonthRange, YearMonth, YearMonthParseError};
pub use rates::{
    build_joint_series, monthly_covid_rate, monthly_fraud_rate, read_monthly_csv,
    write_monthly_csv, MonthlyFraud,
};
pub use record::{
    BenefitType, ClaimField, ClaimRecord, CovidDailyRecord, FieldKind, FieldValue, FraudStatus,
    MonthlyPoint, Severity, ValidationIssue,
};

/// Default population of the study region.
pub const DEFAULT_POPULATION: u64 = 3_000_000;

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(String),
    #[error("missing mandatory column {column:?}")]
    MissingColumn { column: String },
    #[error("schema map line {line}: {message}")]
    SchemaMap { line: usize, message: String },
    #[error("no rows for region {region:?}")]
    NoRegionMatch { region: String },
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Usage(String),
}
