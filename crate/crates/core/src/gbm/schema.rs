use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::GbmError;
use crate::claims::{ClaimField, ClaimRecord, FieldValue};

/// Encoded value of an absent optional field. It sorts below every real value,
/// so missing rows always take the left branch of a split.
pub const MISSING: f64 = f64::MIN;

/// Categorical fields with at most this many distinct values are one-hot encoded.
pub const ONE_HOT_LIMIT: usize = 32;

const NUMERIC: &[ClaimField] = &[
    ClaimField::BilledAmount,
    ClaimField::ApprovedAmount,
    ClaimField::PaidAmount,
    ClaimField::NetAmount,
    ClaimField::DaysStayed,
];

const DURATIONS: &[(&str, ClaimField, ClaimField)] = &[
    (
        "treatment_length",
        ClaimField::TreatmentStart,
        ClaimField::TreatmentEnd,
    ),
    (
        "report_lag",
        ClaimField::TreatmentEnd,
        ClaimField::ClaimReportedDate,
    ),
    (
        "settlement_lag",
        ClaimField::ClaimReportedDate,
        ClaimField::ClaimSettlementDate,
    ),
    (
        "raise_lag",
        ClaimField::DischargeDate,
        ClaimField::ClaimRaisedDate,
    ),
    (
        "surgery_offset",
        ClaimField::TreatmentStart,
        ClaimField::SurgeryDate,
    ),
];

const CATEGORICAL: &[ClaimField] = &[
    ClaimField::BenefitType,
    ClaimField::ClaimStatus,
    ClaimField::ProviderId,
    ClaimField::DiagnosisCode,
    ClaimField::ProcedureCode,
    ClaimField::HospitalDistrict,
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    Numeric {
        field: ClaimField,
    },
    /// Days from `from` to `to`.
    DurationDays {
        from: ClaimField,
        to: ClaimField,
    },
    OneHot {
        field: ClaimField,
        value: String,
    },
    /// Share of fit-time rows carrying the same value; 0 for unseen values.
    Frequency {
        field: ClaimField,
        table: BTreeMap<String, f64>,
    },
    /// 1 when the named trigger rule fired for the claim.
    TriggerFlag {
        rule: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    #[serde(flatten)]
    pub kind: FeatureKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub features: Vec<Feature>,
}

fn categorical_key(v: FieldValue<'_>) -> Option<String> {
    (!v.is_missing()).then(|| v.render())
}

fn numeric(v: FieldValue<'_>) -> f64 {
    match v {
        FieldValue::Money(Some(m)) => m.as_units(),
        FieldValue::Integer(Some(n)) => n as f64,
        _ => MISSING,
    }
}

fn date(v: FieldValue<'_>) -> Option<chrono::NaiveDate> {
    match v {
        FieldValue::Date(d) => d,
        _ => None,
    }
}

/// Builds the feature layout from the training claims. Vocabularies and
/// frequency tables are frozen here.
pub fn build_schema(claims: &[ClaimRecord]) -> Result<FeatureSchema, GbmError> {
    build_schema_with_flags(claims, &[])
}

/// Like [`build_schema`], with one extra 0/1 feature per listed trigger rule.
pub fn build_schema_with_flags(
    claims: &[ClaimRecord],
    flag_rules: &[String],
) -> Result<FeatureSchema, GbmError> {
    if claims.is_empty() {
        return Err(GbmError::Domain(
            "cannot build a feature schema from zero claims".into(),
        ));
    }
    let mut features = Vec::new();
    for &field in NUMERIC {
        features.push(Feature {
            name: field.name().to_string(),
            kind: FeatureKind::Numeric { field },
        });
    }
    for &(name, from, to) in DURATIONS {
        features.push(Feature {
            name: name.to_string(),
            kind: FeatureKind::DurationDays { from, to },
        });
    }
    for &field in CATEGORICAL {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for c in claims {
            if let Some(k) = categorical_key(c.value(field)) {
                *counts.entry(k).or_default() += 1;
            }
        }
        if counts.len() <= ONE_HOT_LIMIT {
            for value in counts.into_keys() {
                features.push(Feature {
                    name: format!("{}={}", field.name(), value),
                    kind: FeatureKind::OneHot { field, value },
                });
            }
        } else {
            let n = claims.len() as f64;
            let table = counts.into_iter().map(|(k, c)| (k, c as f64 / n)).collect();
            features.push(Feature {
                name: format!("{}_frequency", field.name()),
                kind: FeatureKind::Frequency { field, table },
            });
        }
    }
    let unique: BTreeSet<&String> = flag_rules.iter().collect();
    for rule in unique {
        features.push(Feature {
            name: format!("trigger:{rule}"),
            kind: FeatureKind::TriggerFlag { rule: rule.clone() },
        });
    }
    Ok(FeatureSchema { features })
}

impl FeatureSchema {
    pub fn arity(&self) -> usize {
        self.features.len()
    }

    pub fn uses_trigger_flags(&self) -> bool {
        self.features
            .iter()
            .any(|f| matches!(f.kind, FeatureKind::TriggerFlag { .. }))
    }

    /// Encodes a claim. `fired` lists the trigger rules that hit this claim and is
    /// required when the schema has trigger-flag features.
    pub fn encode(
        &self,
        claim: &ClaimRecord,
        fired: Option<&[String]>,
    ) -> Result<Vec<f64>, GbmError> {
        if fired.is_none() && self.uses_trigger_flags() {
            return Err(GbmError::Encoding(format!(
                "claim {}: schema uses trigger flags but none were supplied",
                claim.claim_id
            )));
        }
        Ok(self
            .features
            .iter()
            .map(|f| match &f.kind {
                FeatureKind::Numeric { field } => numeric(claim.value(*field)),
                FeatureKind::DurationDays { from, to } => {
                    match (date(claim.value(*from)), date(claim.value(*to))) {
                        (Some(a), Some(b)) => (b - a).num_days() as f64,
                        _ => MISSING,
                    }
                }
                FeatureKind::OneHot { field, value } => {
                    let hit = categorical_key(claim.value(*field)).is_some_and(|k| &k == value);
                    if hit {
                        1.0
                    } else {
                        0.0
                    }
                }
                FeatureKind::Frequency { field, table } => categorical_key(claim.value(*field))
                    .and_then(|k| table.get(&k).copied())
                    .unwrap_or(0.0),
                FeatureKind::TriggerFlag { rule } => {
                    if fired.unwrap_or(&[]).contains(rule) {
                        1.0
                    } else {
                        0.0
                    }
                }
            })
            .collect())
    }
}
