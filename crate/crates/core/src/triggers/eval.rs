//! Rule evaluation with three-valued logic. A comparison that touches a
//! missing value is unknown; unknown collapses to "no hit" at the rule root.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use chrono::NaiveDate;

use super::ast::{Call, CmpOp, Duration, Expr, Literal};
use super::context::{utilization_baselines, RuleContext, UtilizationBaseline};
use super::{TriggerHit, TriggerRule};
use crate::claims::{ClaimField, ClaimRecord, FieldValue, Money};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    fn from_bool(b: bool) -> Self {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Bool(bool),
    Number(f64),
    Money(Money),
    Date(NaiveDate),
    /// A day span between two dates, compared against calendar durations.
    Span(NaiveDate, NaiveDate),
    Duration(Duration),
    Text(String),
}

impl Value {
    fn render(&self) -> String {
        match self {
            Value::Bool(b) => b.to_string(),
            Value::Number(n) => n.to_string(),
            Value::Money(m) => m.to_string(),
            Value::Date(d) => d.to_string(),
            Value::Span(a, b) => format!("{} days", (*b - *a).num_days()),
            Value::Duration(d) => d.to_string(),
            Value::Text(s) => s.clone(),
        }
    }
}

fn span_vs_duration(from: NaiveDate, to: NaiveDate, d: Duration) -> Option<Ordering> {
    Some(to.cmp(&d.after(from)?))
}

fn compare_values(l: &Value, r: &Value) -> Option<Ordering> {
    use Value::*;
    match (l, r) {
        (Number(a), Number(b)) => a.partial_cmp(b),
        (Money(a), Money(b)) => Some(a.cmp(b)),
        (Money(a), Number(b)) => a.as_units().partial_cmp(b),
        (Number(a), Money(b)) => a.partial_cmp(&b.as_units()),
        (Date(a), Date(b)) => Some(a.cmp(b)),
        (Span(a, b), Duration(d)) => span_vs_duration(*a, *b, *d),
        (Duration(d), Span(a, b)) => span_vs_duration(*a, *b, *d).map(Ordering::reverse),
        (Span(a, b), Span(c, d)) => Some((*b - *a).cmp(&(*d - *c))),
        (Duration(a), Duration(b)) => a.nominal_days().partial_cmp(&b.nominal_days()),
        (Text(a), Text(b)) => Some(a.cmp(b)),
        (Bool(a), Bool(b)) => Some(a.cmp(b)),
        _ => None,
    }
}

type GroupIndex = HashMap<Vec<String>, Vec<usize>>;

/// Per-claim result of a utilization check: `Some(detail)` for claims in the excess.
type ExcessMap = Vec<Option<String>>;

struct Evaluator<'a> {
    claims: &'a [ClaimRecord],
    ctx: &'a RuleContext,
    groups: RefCell<HashMap<Vec<ClaimField>, GroupIndex>>,
    excess: RefCell<HashMap<(ClaimField, u64), Option<std::rc::Rc<ExcessMap>>>>,
}

fn key_of(claim: &ClaimRecord, fields: &[ClaimField]) -> Option<Vec<String>> {
    fields
        .iter()
        .map(|f| {
            let v = claim.value(*f);
            (!v.is_missing()).then(|| v.render())
        })
        .collect()
}

impl<'a> Evaluator<'a> {
    fn new(claims: &'a [ClaimRecord], ctx: &'a RuleContext) -> Self {
        assert_eq!(
            claims.len(),
            ctx.claim_count(),
            "rule context was built from a different claim set"
        );
        Self {
            claims,
            ctx,
            groups: RefCell::new(HashMap::new()),
            excess: RefCell::new(HashMap::new()),
        }
    }

    /// Claims sharing every value of `fields` with claim `i`, itself included.
    /// `None` if claim `i` lacks one of the fields.
    fn group(&self, fields: &[ClaimField], i: usize) -> Option<Vec<usize>> {
        let key = key_of(&self.claims[i], fields)?;
        let mut groups = self.groups.borrow_mut();
        let index = groups.entry(fields.to_vec()).or_insert_with(|| {
            let mut index: GroupIndex = HashMap::new();
            for (j, c) in self.claims.iter().enumerate() {
                if let Some(k) = key_of(c, fields) {
                    index.entry(k).or_default().push(j);
                }
            }
            index
        });
        index.get(&key).cloned()
    }

    fn excess_map(&self, field: ClaimField, k: f64) -> Option<std::rc::Rc<ExcessMap>> {
        let cache_key = (field, k.to_bits());
        if let Some(hit) = self.excess.borrow().get(&cache_key) {
            return hit.clone();
        }
        let computed = if field == ClaimField::ProcedureCode {
            self.ctx.procedure_baseline().cloned()
        } else {
            utilization_baselines(self.claims, field, self.ctx.baseline_window)
        }
        .map(|baseline| std::rc::Rc::new(self.compute_excess(field, k, &baseline)));
        self.excess.borrow_mut().insert(cache_key, computed.clone());
        computed
    }

    /// Within each (key, month), claims are ranked by (reported date, claim id);
    /// once the month's count exceeds mean + k·sd, the claims ranked past
    /// ⌊mean + k·sd⌋ form the excess.
    fn compute_excess(
        &self,
        field: ClaimField,
        k: f64,
        baseline: &std::collections::BTreeMap<String, UtilizationBaseline>,
    ) -> ExcessMap {
        let mut cells: HashMap<(String, crate::claims::YearMonth), Vec<usize>> = HashMap::new();
        for (i, c) in self.claims.iter().enumerate() {
            let v = c.value(field);
            if v.is_missing() {
                continue;
            }
            cells
                .entry((v.render(), c.reported_month()))
                .or_default()
                .push(i);
        }
        let mut out = vec![None; self.claims.len()];
        let zero = UtilizationBaseline { mean: 0.0, sd: 0.0 };
        for ((key, month), mut members) in cells {
            let b = baseline.get(&key).copied().unwrap_or(zero);
            let threshold = b.threshold(k);
            let count = members.len();
            if (count as f64) <= threshold {
                continue;
            }
            members.sort_by(|&a, &b| {
                let (ca, cb) = (&self.claims[a], &self.claims[b]);
                ca.claim_reported_date
                    .cmp(&cb.claim_reported_date)
                    .then_with(|| ca.claim_id.cmp(&cb.claim_id))
            });
            let allowed = threshold.floor() as usize;
            for &i in &members[allowed..] {
                out[i] = Some(format!(
                    "{field} {key}: {count} claims in {month} above baseline mean {:.2} + {k}·sd {:.2}",
                    b.mean, b.sd
                ));
            }
        }
        out
    }

    fn value(&self, expr: &Expr, i: usize) -> Option<Value> {
        let claim = &self.claims[i];
        match expr {
            Expr::Literal(l) => Some(match l {
                Literal::Number(n) => Value::Number(*n),
                Literal::Text(s) => Value::Text(s.clone()),
                Literal::Date(d) => Value::Date(*d),
                Literal::Duration(d) => Value::Duration(*d),
                Literal::Bool(b) => Value::Bool(*b),
            }),
            Expr::Field(f) => match claim.value(*f) {
                FieldValue::Text(s) => (!s.is_empty()).then(|| Value::Text(s.to_string())),
                FieldValue::Category(c) => c.map(|c| Value::Text(c.to_string())),
                FieldValue::Date(d) => d.map(Value::Date),
                FieldValue::Money(m) => m.map(Value::Money),
                FieldValue::Integer(n) => n.map(|n| Value::Number(n as f64)),
            },
            Expr::Call(Call::DaysBetween(a, b)) => match (self.value(a, i)?, self.value(b, i)?) {
                (Value::Date(a), Value::Date(b)) => Some(Value::Span(a, b)),
                _ => None,
            },
            Expr::Call(Call::DurationInStatus(status)) => claim
                .claim_status
                .trim()
                .eq_ignore_ascii_case(status.trim())
                .then_some(Value::Span(
                    claim.claim_reported_date,
                    self.ctx.evaluation_date,
                )),
            Expr::Call(Call::CountSame(fields)) => {
                self.group(fields, i).map(|g| Value::Number(g.len() as f64))
            }
            Expr::Call(Call::DistinctCount(target, keys)) => {
                let group = self.group(keys, i)?;
                let distinct: BTreeSet<String> = group
                    .iter()
                    .map(|&j| self.claims[j].value(*target))
                    .filter(|v| !v.is_missing())
                    .map(|v| v.render())
                    .collect();
                Some(Value::Number(distinct.len() as f64))
            }
            _ => match self.truth(expr, i, &mut Vec::new()) {
                Truth::True => Some(Value::Bool(true)),
                Truth::False => Some(Value::Bool(false)),
                Truth::Unknown => None,
            },
        }
    }

    /// Evaluates a boolean expression, appending evidence for true sub-conditions.
    fn truth(&self, expr: &Expr, i: usize, evidence: &mut Vec<String>) -> Truth {
        let claim = &self.claims[i];
        match expr {
            Expr::Literal(Literal::Bool(b)) => Truth::from_bool(*b),
            Expr::Not(inner) => match self.truth(inner, i, &mut Vec::new()) {
                Truth::True => Truth::False,
                Truth::False => Truth::True,
                Truth::Unknown => Truth::Unknown,
            },
            Expr::And(items) => {
                let mut local = Vec::new();
                let results: Vec<Truth> =
                    items.iter().map(|e| self.truth(e, i, &mut local)).collect();
                if results.contains(&Truth::False) {
                    Truth::False
                } else if results.contains(&Truth::Unknown) {
                    Truth::Unknown
                } else {
                    evidence.extend(local);
                    Truth::True
                }
            }
            Expr::Or(items) => {
                let mut local = Vec::new();
                let results: Vec<Truth> =
                    items.iter().map(|e| self.truth(e, i, &mut local)).collect();
                if results.contains(&Truth::True) {
                    evidence.extend(local);
                    Truth::True
                } else if results.contains(&Truth::Unknown) {
                    Truth::Unknown
                } else {
                    Truth::False
                }
            }
            Expr::Compare(op, l, r) => {
                let (Some(lv), Some(rv)) = (self.value(l, i), self.value(r, i)) else {
                    return Truth::Unknown;
                };
                let Some(ord) = compare_values(&lv, &rv) else {
                    return Truth::Unknown;
                };
                let holds = op.holds(ord);
                if holds {
                    evidence.extend(compare_evidence(*op, l, &lv, r, &rv));
                }
                Truth::from_bool(holds)
            }
            Expr::Call(Call::DuplicateExists(fields)) => match self.group(fields, i) {
                None => Truth::Unknown,
                Some(group) => {
                    let others: Vec<&str> = group
                        .iter()
                        .filter(|&&j| j != i && self.claims[j].claim_id != claim.claim_id)
                        .map(|&j| self.claims[j].claim_id.as_str())
                        .collect();
                    if others.is_empty() {
                        Truth::False
                    } else {
                        let names: Vec<&str> = fields.iter().map(|f| f.name()).collect();
                        evidence.push(format!(
                            "same {} as {}",
                            names.join(", "),
                            others.join(", ")
                        ));
                        Truth::True
                    }
                }
            },
            Expr::Call(Call::UtilizationExcess { field, k }) => {
                if claim.value(*field).is_missing() {
                    return Truth::Unknown;
                }
                let Some(map) = self.excess_map(*field, k.unwrap_or(self.ctx.k)) else {
                    return Truth::Unknown;
                };
                match &map[i] {
                    Some(detail) => {
                        evidence.push(detail.clone());
                        Truth::True
                    }
                    None => Truth::False,
                }
            }
            Expr::Call(Call::IsMissing(field)) => {
                let missing = claim.value(*field).is_missing();
                if missing {
                    evidence.push(format!("{field} missing"));
                }
                Truth::from_bool(missing)
            }
            Expr::Call(Call::RequiresExternal(_)) => Truth::False,
            // Only non-boolean expressions remain; the parser keeps them out of boolean positions.
            _ => Truth::Unknown,
        }
    }
}

fn compare_evidence(op: CmpOp, l: &Expr, lv: &Value, r: &Expr, rv: &Value) -> Vec<String> {
    if let Value::Span(..) = lv {
        return vec![lv.render()];
    }
    if let Value::Span(..) = rv {
        return vec![rv.render()];
    }
    let mut out = Vec::new();
    for (e, v) in [(l, lv), (r, rv)] {
        if !matches!(e, Expr::Literal(_)) {
            out.push(format!("{e} = {}", v.render()));
        }
    }
    if out.is_empty() {
        out.push(format!("{l} {} {r}", op.symbol()));
    }
    out
}

/// Evaluates every rule against every claim. Hits are sorted by (claim_id,
/// rule_id) and unique. Rules needing an unavailable baseline never fire;
/// check them first with [`RuleContext::validate_rules`].
pub fn evaluate_rules(
    rules: &[TriggerRule],
    claims: &[ClaimRecord],
    ctx: &RuleContext,
) -> Vec<TriggerHit> {
    let ev = Evaluator::new(claims, ctx);
    let mut hits = Vec::new();
    for rule in rules {
        for (i, claim) in claims.iter().enumerate() {
            let mut evidence = Vec::new();
            if ev.truth(&rule.expression, i, &mut evidence) == Truth::True {
                evidence.dedup();
                let detail = if evidence.is_empty() {
                    rule.expression.to_string()
                } else {
                    evidence.join("; ")
                };
                hits.push(TriggerHit {
                    claim_id: claim.claim_id.clone(),
                    rule_id: rule.id.clone(),
                    category: rule.category,
                    detail,
                });
            }
        }
    }
    hits.sort_by(|a, b| (&a.claim_id, &a.rule_id).cmp(&(&b.claim_id, &b.rule_id)));
    hits.dedup_by(|a, b| a.claim_id == b.claim_id && a.rule_id == b.rule_id);
    hits
}
