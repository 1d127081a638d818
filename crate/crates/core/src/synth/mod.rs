//! Deterministic synthetic data: an epidemic curve and a claim corpus whose
//! monthly fraud fraction follows a configured link to the infection rate,
//! with optional planted trigger violations.
//!
//! All randomness comes from one ChaCha8 stream seeded with `seed`
//! (`rand_chacha::ChaCha8Rng::seed_from_u64`), consumed month by month.

mod claims;
mod config;
mod epidemic;
pub mod reference;

pub use claims::{
    generate_claims, write_ground_truth_csv, GroundTruth, MonthTruth, Violation, PROCEDURES,
};
pub use config::{
    ClaimsConfig, EpidemicConfig, GrowthKind, LinkKind, Sampling, SynthConfig, PLANTABLE,
};
pub use epidemic::{cumulative_cases, generate_epidemic, month_end_cumulative};

use crate::claims::{ClaimRecord, CovidDailyRecord};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("config key {key:?}: {message}")]
    Config { key: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

/// Epidemic, claims and ground truth in one call.
pub fn generate(
    cfg: &SynthConfig,
) -> Result<(Vec<CovidDailyRecord>, Vec<ClaimRecord>, GroundTruth), SynthError> {
    let epidemic = generate_epidemic(cfg)?;
    let (claims, truth) = generate_claims(cfg, &epidemic)?;
    Ok((epidemic, claims, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::claims::{monthly_fraud_rate, write_claims_csv, YearMonth};
    use crate::triggers::{build_context, builtin_rules, evaluate_rules, flag_claims};

    fn small(extra: &str) -> SynthConfig {
        SynthConfig::parse(&format!("claims.per_month = 200\nseed = 3\n{extra}")).unwrap()
    }

    #[test]
    fn realized_counts_match_truth() {
        let cfg = small("");
        let (_, claims, truth) = generate(&cfg).unwrap();
        for m in &truth.months {
            let r = monthly_fraud_rate(&claims, m.month);
            assert_eq!(r.reported_claims, m.claims);
            assert_eq!(r.fraud_claims, m.fraud_claims);
            assert_eq!(m.fraud_claims, m.expected_fraud.round() as u64);
        }
    }

    #[test]
    fn flat_linear_link_gives_base_fraction() {
        let cfg = small("claims.link = linear\nclaims.link_slope = 0\nclaims.base_fraud = 0.1");
        let (_, _, truth) = generate(&cfg).unwrap();
        assert!(truth
            .months
            .iter()
            .all(|m| m.fraud_fraction == 0.1 && m.fraud_claims == 20));
    }

    #[test]
    fn identical_config_gives_identical_csv() {
        let cfg = small("plant.late_submission = 1");
        let csv = |cfg: &SynthConfig| {
            let (_, claims, _) = generate(cfg).unwrap();
            let mut buf = Vec::new();
            write_claims_csv(&mut buf, &claims).unwrap();
            buf
        };
        assert_eq!(csv(&cfg), csv(&cfg));
        let mut other = cfg.clone();
        other.seed = 4;
        assert_ne!(csv(&cfg), csv(&other));
    }

    #[test]
    fn planted_late_submissions_in_may() {
        let cfg = small("plant.late_submission.2020-05 = 3");
        let (_, claims, truth) = generate(&cfg).unwrap();
        let may = YearMonth::new(2020, 5).unwrap();
        let late: Vec<&ClaimRecord> = claims
            .iter()
            .filter(|c| c.reported_month() == may)
            .filter(|c| (c.claim_raised_date.unwrap() - c.discharge_date.unwrap()).num_days() > 15)
            .collect();
        assert_eq!(late.len(), 3);
        let ids: std::collections::BTreeSet<String> =
            late.iter().map(|c| c.claim_id.clone()).collect();
        assert_eq!(ids, truth.planted_for("late_submission"));
    }

    #[test]
    fn flagged_set_equals_planted_set() {
        let plants: String = PLANTABLE
            .iter()
            .map(|r| format!("plant.{r}.2020-04 = 2\n"))
            .collect();
        let cfg = small(&plants);
        let (_, claims, truth) = generate(&cfg).unwrap();
        let ctx = build_context(&claims, cfg.evaluation_date, cfg.baseline);
        let hits = evaluate_rules(&builtin_rules(), &claims, &ctx);
        let flags = flag_claims(&hits, &claims).unwrap();
        let flagged: std::collections::BTreeSet<String> = flags
            .into_iter()
            .filter(|(_, f)| f.flagged)
            .map(|(id, _)| id)
            .collect();
        assert_eq!(flagged, truth.planted_ids());
        for rule in PLANTABLE {
            let fired: std::collections::BTreeSet<String> = hits
                .iter()
                .filter(|h| h.rule_id == *rule)
                .map(|h| h.claim_id.clone())
                .collect();
            assert_eq!(fired, truth.planted_for(rule), "{rule}");
        }
    }
}
