//! Built-in trigger catalog: the pre-epidemic triggers and the epidemic-era
//! additions. Triggers that need data outside the claim table are kept as
//! placeholders that never fire.

use super::parser::parse_rule_set;
use super::TriggerRule;

/// Tunable thresholds of the built-in rules.
#[derive(Debug, Clone, PartialEq)]
pub struct TriggerParams {
    pub late_submission_days: i64,
    pub stale_reject_months: i64,
    pub coverage_extension_days: i64,
    /// Currency units; 10 lakhs.
    pub exgratia_threshold: f64,
    pub premium_reduction_pct: f64,
    pub policy_decline_pct: f64,
    pub policy_decline_months: i64,
    pub long_stay_days: i64,
    pub high_bill_threshold: f64,
    pub multiple_providers: i64,
}

impl Default for TriggerParams {
    fn default() -> Self {
        Self {
            late_submission_days: 15,
            stale_reject_months: 3,
            coverage_extension_days: 30,
            exgratia_threshold: 1_000_000.0,
            premium_reduction_pct: 5.0,
            policy_decline_pct: 10.0,
            policy_decline_months: 3,
            long_stay_days: 30,
            high_bill_threshold: 500_000.0,
            multiple_providers: 3,
        }
    }
}

pub fn builtin_source(p: &TriggerParams) -> String {
    let mut s = String::new();
    let mut rule = |id: &str, cat: &str, desc: &str, expr: &str| {
        s.push_str(&format!(
            "rule {id} category {cat} description {desc:?}:\n    {expr};\n\n"
        ));
    };
    let external = |note: &str| format!("requires_external({note:?})");

    rule(
        "long_time_off",
        "general",
        "abnormally long time off for a given injury",
        &format!("days_stayed > {}", p.long_stay_days),
    );
    rule(
        "multiple_providers",
        "general",
        "multiple medical providers for the same insured and diagnosis",
        &format!(
            "distinct_count(provider_id, insured_id, diagnosis_code) >= {}",
            p.multiple_providers
        ),
    );
    rule(
        "unsigned_application",
        "general",
        "applicant did not sign and date the application",
        &external("application form signature"),
    );
    rule(
        "fake_test_reports",
        "general",
        "fake test reports",
        &external("test report verification"),
    );
    rule(
        "document_tampering",
        "general",
        "visible tampering of documents",
        &external("document images"),
    );
    rule(
        "handwritten_bills",
        "general",
        "handwritten bills",
        &external("bill images"),
    );
    rule(
        "high_value_bill",
        "general",
        "high value bill",
        &format!("billed_amount > {}", p.high_bill_threshold),
    );
    rule(
        "coverage_extension",
        "general",
        "coverage extension requested",
        &external(&format!(
            "coverage extension requests over {} days",
            p.coverage_extension_days
        )),
    );
    rule(
        "automatic_renewal",
        "general",
        "automatic renewal requested",
        &external("renewal requests"),
    );
    rule(
        "exgratia_threshold",
        "general",
        "one-off ex-gratia payment above threshold",
        &format!("paid_amount > {}", p.exgratia_threshold),
    );
    rule(
        "premium_reduction",
        "general",
        "minimum and deposit premiums reduced",
        &external(&format!(
            "premium history, reduction over {}%",
            p.premium_reduction_pct
        )),
    );
    rule(
        "policy_count_decline",
        "general",
        "exposure not tracked",
        &external(&format!(
            "policy counts, decline over {}% in {} months",
            p.policy_decline_pct, p.policy_decline_months
        )),
    );
    rule(
        "non_isolation",
        "general",
        "affected lines of business not separated",
        &external("line-of-business portfolio"),
    );
    rule(
        "duplicate_package",
        "fraud_abuse",
        "package already taken by the same insured under another claim id",
        "duplicate_exists(insured_id, procedure_code)",
    );
    rule(
        "stale_reject",
        "fraud_abuse",
        "claim held in rejected status too long",
        &format!(
            "duration_in_status(\"rejected\") > {}mo",
            p.stale_reject_months
        ),
    );
    rule(
        "suspicious_covid_package",
        "fraud_abuse",
        "suspicious package use during the epidemic",
        &external("package review"),
    );
    rule(
        "high_utilization",
        "fraud_abuse",
        "excess use of a highly utilized package",
        "utilization_excess(procedure_code)",
    );
    rule(
        "late_submission",
        "process",
        "claim submitted late after discharge",
        &format!(
            "days_between(discharge_date, claim_raised_date) > {}d",
            p.late_submission_days
        ),
    );
    rule(
        "late_discharge_docs",
        "process",
        "discharge documents submitted late",
        &external(&format!(
            "discharge document receipt dates, over {} days",
            p.late_submission_days
        )),
    );
    rule(
        "procedure_not_performed",
        "process",
        "billed procedure not performed",
        &external("adjudication records"),
    );
    rule(
        "wrong_package",
        "eligibility",
        "wrong package blocked",
        &external("adjudication records"),
    );
    rule(
        "oral_medication",
        "eligibility",
        "oral medication not payable",
        &external("line-item bills"),
    );
    rule(
        "referral_slip_unsigned",
        "eligibility",
        "referral slip lacks district hospital sign and stamp",
        &external("referral slips"),
    );
    s
}

pub fn builtin_rules_with(params: &TriggerParams) -> Vec<TriggerRule> {
    parse_rule_set(&builtin_source(params)).expect("built-in catalog parses")
}

pub fn builtin_rules() -> Vec<TriggerRule> {
    builtin_rules_with(&TriggerParams::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triggers::ast::Category;
    use crate::triggers::{parse_rule, render};

    fn find<'a>(rules: &'a [TriggerRule], id: &str) -> &'a TriggerRule {
        rules
            .iter()
            .find(|r| r.id == id)
            .unwrap_or_else(|| panic!("no rule {id}"))
    }

    #[test]
    fn catalog_entries() {
        let rules = builtin_rules();
        assert_eq!(find(&rules, "late_submission").category, Category::Process);
        let stale = find(&rules, "stale_reject");
        assert_eq!(
            stale.expression.to_string(),
            "duration_in_status(\"rejected\") > 3mo"
        );
        let exg = find(&rules, "exgratia_threshold");
        assert_eq!(exg.expression.to_string(), "paid_amount > 1000000");
        assert!(find(&rules, "document_tampering").is_placeholder());
        assert!(!find(&rules, "duplicate_package").is_placeholder());
        assert_eq!(
            find(&rules, "referral_slip_unsigned").category,
            Category::Eligibility
        );
    }

    #[test]
    fn every_builtin_round_trips() {
        for rule in builtin_rules() {
            let text = render(&rule);
            assert_eq!(parse_rule(&text).unwrap(), rule, "{text}");
        }
    }

    #[test]
    fn params_change_thresholds() {
        let p = TriggerParams {
            late_submission_days: 20,
            ..TriggerParams::default()
        };
        let rules = builtin_rules_with(&p);
        assert!(find(&rules, "late_submission")
            .expression
            .to_string()
            .ends_with("> 20d"));
    }
}
