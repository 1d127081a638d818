//! Gradient-boosted regression trees for fraud probability.

mod dataset;
mod model;
mod schema;
mod tree;

pub use dataset::{train_test_split, LabeledDataset};
pub use model::{
    fit_gbm, log_loss, sigmoid, BoostedModel, Hyperparameters, MODEL_FORMAT, MODEL_VERSION,
};
pub use schema::{
    build_schema, build_schema_with_flags, Feature, FeatureKind, FeatureSchema, MISSING,
    ONE_HOT_LIMIT,
};
pub use tree::Node;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GbmError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Usage(String),
    #[error("non-finite feature value at row {row} (claim {id}), column {column}")]
    NonFinite {
        row: usize,
        id: String,
        column: String,
    },
    #[error("feature vector has {got} values, schema expects {expected}")]
    Arity { expected: usize, got: usize },
    #[error("encoding error: {0}")]
    Encoding(String),
    #[error("model file: {0}")]
    Model(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::claims::ClaimRecord;
    use crate::test_support::claim;

    #[test]
    fn schema_cardinality_rules() {
        let mut claims: Vec<ClaimRecord> = (0..60)
            .map(|i| claim(&format!("c{i}"), "2020-05-01"))
            .collect();
        for (i, c) in claims.iter_mut().enumerate() {
            c.benefit_type = Some(if i % 2 == 0 {
                crate::claims::BenefitType::Medical
            } else {
                crate::claims::BenefitType::Surgical
            });
            c.hospital_district = format!("D{}", i % 50);
        }
        let s = build_schema(&claims).unwrap();
        let names: Vec<&str> = s.features.iter().map(|f| f.name.as_str()).collect();
        assert!(names.contains(&"benefit_type=medical"));
        assert!(names.contains(&"benefit_type=surgical"));
        assert_eq!(
            names
                .iter()
                .filter(|n| n.starts_with("benefit_type"))
                .count(),
            2
        );
        assert_eq!(
            names
                .iter()
                .filter(|n| n.starts_with("hospital_district"))
                .count(),
            1
        );
        assert!(names.contains(&"hospital_district_frequency"));
        assert!(s.features.iter().any(|f| matches!(
            f.kind,
            FeatureKind::DurationDays {
                from: crate::claims::ClaimField::TreatmentStart,
                to: crate::claims::ClaimField::TreatmentEnd
            }
        )));
        assert!(!names
            .iter()
            .any(|n| n.contains("fraud_status") || n.contains("claim_id")));
        assert!(matches!(build_schema(&[]), Err(GbmError::Domain(_))));
    }

    #[test]
    fn encoding_arity_and_missing() {
        let claims = vec![claim("a", "2020-05-01"), claim("b", "2020-05-02")];
        let s = build_schema(&claims).unwrap();
        let x = s.encode(&claims[0], None).unwrap();
        assert_eq!(x.len(), s.arity());
        let paid = s
            .features
            .iter()
            .position(|f| f.name == "paid_amount")
            .unwrap();
        assert_eq!(x[paid], MISSING);

        let flagged = build_schema_with_flags(&claims, &["late_submission".to_string()]).unwrap();
        assert!(matches!(
            flagged.encode(&claims[0], None),
            Err(GbmError::Encoding(_))
        ));
        let fired = vec!["late_submission".to_string()];
        let x = flagged.encode(&claims[0], Some(&fired)).unwrap();
        assert_eq!(*x.last().unwrap(), 1.0);
    }
}
