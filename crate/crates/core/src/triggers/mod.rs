//! Trigger rules: a small typed rule language, cross-claim evaluation and the
//! built-in catalog.
//!
//! ```text
//! rule late_submission category process:
//!     days_between(discharge_date, claim_raised_date) > 15d;
//! ```

mod ast;
mod builtin;
mod context;
mod error;
mod eval;
mod lexer;
mod parser;

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

pub use ast::{Call, Category, CmpOp, Duration, Expr, Literal, Type};
pub use builtin::{builtin_rules, builtin_rules_with, builtin_source, TriggerParams};
pub use context::{
    build_context, default_baseline_window, utilization_baselines, RuleContext,
    UtilizationBaseline, DEFAULT_K,
};
pub use error::{RuleError, RuleErrorKind, TriggerError};
pub use eval::evaluate_rules;
pub use parser::{field_type, parse_rule, parse_rule_set};

use crate::claims::{ClaimRecord, DataError};

#[derive(Debug, Clone, PartialEq)]
pub struct TriggerRule {
    pub id: String,
    pub category: Category,
    pub description: String,
    pub expression: Expr,
}

impl TriggerRule {
    /// Placeholder rules stand in for checks on data the claim table lacks.
    pub fn is_placeholder(&self) -> bool {
        let mut found = false;
        self.expression.walk(&mut |e| {
            found |= matches!(e, Expr::Call(Call::RequiresExternal(_)));
        });
        found
    }

    /// Notes of every `requires_external` call in the rule.
    pub fn external_notes(&self) -> Vec<String> {
        let mut notes = Vec::new();
        self.expression.walk(&mut |e| {
            if let Expr::Call(Call::RequiresExternal(note)) = e {
                notes.push(note.clone());
            }
        });
        notes
    }
}

/// Canonical source text of a rule; parses back to an equal rule.
pub fn render(rule: &TriggerRule) -> String {
    let mut s = format!("rule {} category {}", rule.id, rule.category);
    if !rule.description.is_empty() {
        s.push_str(" description ");
        s.push_str(&ast::quote(&rule.description));
    }
    s.push_str(": ");
    s.push_str(&rule.expression.to_string());
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriggerHit {
    pub claim_id: String,
    pub rule_id: String,
    pub category: Category,
    pub detail: String,
}

impl Serialize for Category {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ClaimFlag {
    pub flagged: bool,
    pub rules: Vec<String>,
}

/// One entry per claim; flagged iff at least one hit names it.
pub fn flag_claims(
    hits: &[TriggerHit],
    claims: &[ClaimRecord],
) -> Result<BTreeMap<String, ClaimFlag>, TriggerError> {
    let mut flags: BTreeMap<String, ClaimFlag> = claims
        .iter()
        .map(|c| (c.claim_id.clone(), ClaimFlag::default()))
        .collect();
    for hit in hits {
        let flag = flags
            .get_mut(&hit.claim_id)
            .ok_or_else(|| TriggerError::UnknownClaim {
                claim_id: hit.claim_id.clone(),
                rule_id: hit.rule_id.clone(),
            })?;
        flag.flagged = true;
        if !flag.rules.contains(&hit.rule_id) {
            flag.rules.push(hit.rule_id.clone());
        }
    }
    for flag in flags.values_mut() {
        flag.rules.sort();
    }
    Ok(flags)
}

pub fn write_hits_csv<W: Write>(out: W, hits: &[TriggerHit]) -> Result<(), DataError> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| DataError::Csv(e.to_string());
    w.write_record(["claim_id", "rule_id", "category", "detail"])
        .map_err(csv_err)?;
    for h in hits {
        w.write_record([
            h.claim_id.as_str(),
            h.rule_id.as_str(),
            h.category.as_str(),
            h.detail.as_str(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use chrono::NaiveDate;

    use super::*;
    use crate::claims::Money;
    use crate::test_support::claim;

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn run(rules: &str, claims: &[ClaimRecord]) -> Vec<TriggerHit> {
        let rules = parse_rule_set(rules).unwrap();
        let ctx = build_context(claims, date("2020-09-01"), default_baseline_window());
        evaluate_rules(&rules, claims, &ctx)
    }

    const LATE: &str = "rule late_submission category process: days_between(discharge_date, claim_raised_date) > 15d";

    #[test]
    fn late_submission_detail() {
        let mut c = claim("C1", "2020-05-21");
        c.discharge_date = Some(date("2020-05-01"));
        c.claim_raised_date = Some(date("2020-05-20"));
        let hits = run(LATE, &[c.clone()]);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].detail, "19 days");
        assert_eq!(hits[0].category, Category::Process);

        c.claim_raised_date = Some(date("2020-05-10"));
        assert!(run(LATE, &[c.clone()]).is_empty());
        // exactly 15 days is not late
        c.claim_raised_date = Some(date("2020-05-16"));
        assert!(run(LATE, &[c]).is_empty());
    }

    #[test]
    fn missing_dates_never_fire() {
        let c = claim("C1", "2020-05-21");
        assert!(run(LATE, &[c.clone()]).is_empty());
        let negated =
            "rule r category process: not days_between(discharge_date, claim_raised_date) > 15d";
        assert!(run(negated, &[c.clone()]).is_empty());
        let wrapped = "rule r category process: is_missing(discharge_date) or days_between(discharge_date, claim_raised_date) > 15d";
        let hits = run(wrapped, &[c]);
        assert_eq!(hits[0].detail, "discharge_date missing");
    }

    #[test]
    fn duplicate_package_flags_both() {
        let mut a = claim("A", "2020-04-01");
        let mut b = claim("B", "2020-04-09");
        for c in [&mut a, &mut b] {
            c.insured_id = "I9".into();
            c.procedure_code = "PKG".into();
        }
        let other = claim("C", "2020-04-02");
        let hits = run(
            "rule duplicate_package category fraud_abuse: duplicate_exists(insured_id, procedure_code)",
            &[a, b, other],
        );
        let ids: Vec<&str> = hits.iter().map(|h| h.claim_id.as_str()).collect();
        assert_eq!(ids, ["A", "B"]);
        assert_eq!(hits[0].detail, "same insured_id, procedure_code as B");
    }

    #[test]
    fn stale_reject_uses_evaluation_date() {
        let mut old = claim("OLD", "2020-05-01");
        old.claim_status = "Rejected".into();
        let mut recent = claim("NEW", "2020-06-15");
        recent.claim_status = "rejected".into();
        let mut open = claim("OPEN", "2020-01-01");
        open.claim_status = "open".into();
        let hits = run(
            "rule stale_reject category fraud_abuse: duration_in_status(\"rejected\") > 3mo",
            &[old, recent, open],
        );
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].claim_id, "OLD");
        assert_eq!(hits[0].detail, "123 days");
    }

    #[test]
    fn money_and_counts() {
        let mut c = claim("C1", "2020-05-01");
        c.paid_amount = Some(Money::from_units(1_200_000));
        let hits = run(
            "rule x category general: paid_amount > 1000000",
            &[c.clone()],
        );
        assert_eq!(hits[0].detail, "paid_amount = 1200000.00");
        c.paid_amount = Some(Money::from_units(1_000_000));
        assert!(run("rule x category general: paid_amount > 1000000", &[c]).is_empty());

        let mut claims: Vec<ClaimRecord> = (0..3)
            .map(|i| claim(&format!("M{i}"), "2020-05-01"))
            .collect();
        for (i, c) in claims.iter_mut().enumerate() {
            c.insured_id = "SAME".into();
            c.provider_id = format!("PR{i}");
        }
        let hits = run(
            "rule mp category general: distinct_count(provider_id, insured_id, diagnosis_code) >= 3",
            &claims,
        );
        assert_eq!(hits.len(), 3);
        assert_eq!(
            run(
                "rule cs category general: count_same(insured_id) = 3",
                &claims
            )
            .len(),
            3
        );
    }

    #[test]
    fn utilization_excess_ranks_claims() {
        // baseline: 2 claims per month for P over Aug-19..Feb-20
        let mut claims = Vec::new();
        for m in [
            "2019-08", "2019-09", "2019-10", "2019-11", "2019-12", "2020-01", "2020-02",
        ] {
            for d in 1..=2 {
                let mut c = claim(&format!("B{m}-{d}"), &format!("{m}-0{d}"));
                c.procedure_code = "P".into();
                claims.push(c);
            }
        }
        for d in 1..=5 {
            let mut c = claim(&format!("X{d}"), &format!("2020-05-0{d}"));
            c.procedure_code = "P".into();
            claims.push(c);
        }
        let hits = run(
            "rule hu category fraud_abuse: utilization_excess(procedure_code)",
            &claims,
        );
        let ids: Vec<&str> = hits.iter().map(|h| h.claim_id.as_str()).collect();
        assert_eq!(ids, ["X3", "X4", "X5"]);
    }

    #[test]
    fn placeholders_never_fire() {
        let claims = vec![claim("C", "2020-05-01")];
        let rules = builtin_rules();
        let ctx = build_context(&claims, date("2020-09-01"), default_baseline_window());
        let placeholders: Vec<TriggerRule> =
            rules.into_iter().filter(|r| r.is_placeholder()).collect();
        assert!(placeholders.len() >= 10);
        assert!(evaluate_rules(&placeholders, &claims, &ctx).is_empty());
        assert!(!placeholders[0].external_notes().is_empty());
    }

    #[test]
    fn validate_reports_empty_baseline() {
        let claims = vec![claim("C", "2020-05-01")];
        let rules = parse_rule_set(
            "rule hu category fraud_abuse: utilization_excess(procedure_code)\nrule ok category general: days_stayed > 3",
        )
        .unwrap();
        let ctx = build_context(&claims, date("2020-09-01"), default_baseline_window());
        assert!(matches!(
            ctx.validate_rules(&claims, &rules),
            Err(TriggerError::EmptyBaseline { ref rule_id, .. }) if rule_id == "hu"
        ));
        assert!(ctx.validate_rules(&claims, &rules[1..]).is_ok());
    }

    #[test]
    fn flags_cover_every_claim() {
        let claims = vec![claim("A", "2020-05-01"), claim("B", "2020-05-01")];
        let none = flag_claims(&[], &claims).unwrap();
        assert_eq!(none.len(), 2);
        assert!(none.values().all(|f| !f.flagged));

        let hit = |r: &str| TriggerHit {
            claim_id: "A".into(),
            rule_id: r.into(),
            category: Category::General,
            detail: String::new(),
        };
        let flags = flag_claims(&[hit("r1"), hit("r2"), hit("r3")], &claims).unwrap();
        assert!(flags["A"].flagged);
        assert_eq!(flags["A"].rules, ["r1", "r2", "r3"]);
        assert!(!flags["B"].flagged);

        let mut stray = hit("r1");
        stray.claim_id = "Z".into();
        assert!(matches!(
            flag_claims(&[stray], &claims),
            Err(TriggerError::UnknownClaim { .. })
        ));
    }

    #[test]
    fn hits_csv() {
        let hits = vec![TriggerHit {
            claim_id: "A".into(),
            rule_id: "late_submission".into(),
            category: Category::Process,
            detail: "19 days".into(),
        }];
        let mut out = Vec::new();
        write_hits_csv(&mut out, &hits).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "claim_id,rule_id,category,detail\nA,late_submission,process,19 days\n"
        );
    }

    #[test]
    fn render_escapes_description() {
        let rule = TriggerRule {
            id: "r".into(),
            category: Category::General,
            description: "say \"hi\" \\ bye".into(),
            expression: Expr::Not(Box::new(Expr::Or(vec![
                Expr::Call(Call::IsMissing(crate::claims::ClaimField::SurgeryDate)),
                Expr::Literal(Literal::Bool(false)),
            ]))),
        };
        assert_eq!(parse_rule(&render(&rule)).unwrap(), rule);
    }
}
