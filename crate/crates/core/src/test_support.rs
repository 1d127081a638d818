use crate::claims::{ClaimRecord, FraudStatus, Money};

/// A claim with every optional field empty.
pub(crate) fn claim(id: &str, reported: &str) -> ClaimRecord {
    ClaimRecord {
        policy_number: "POL".into(),
        insured_id: format!("I-{id}"),
        claim_id: id.into(),
        benefit_type: None,
        claim_status: "open".into(),
        treatment_start: None,
        treatment_end: None,
        claim_settlement_date: None,
        claim_reported_date: reported.parse().unwrap(),
        billed_amount: Money::from_units(1000),
        approved_amount: None,
        paid_amount: None,
        provider_id: "PR1".into(),
        provider_name: "Provider".into(),
        days_stayed: 1,
        diagnosis_code: "D1".into(),
        diagnosis_name: "Diagnosis".into(),
        procedure_code: format!("P-{id}"),
        procedure_name: "Procedure".into(),
        net_amount: None,
        claim_paid_date: None,
        surgery_date: None,
        discharge_date: None,
        claim_raised_date: None,
        hospital_district: "District".into(),
        fraud_status: FraudStatus::NotFraud,
    }
}
