use std::collections::BTreeMap;

use chrono::NaiveDate;

use super::ast::{Call, Expr};
use super::error::TriggerError;
use super::TriggerRule;
use crate::claims::{ClaimField, ClaimRecord, MonthRange, YearMonth};

/// Mean and population standard deviation of one key's monthly claim counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilizationBaseline {
    pub mean: f64,
    pub sd: f64,
}

impl UtilizationBaseline {
    pub fn threshold(&self, k: f64) -> f64 {
        self.mean + k * self.sd
    }
}

/// Monthly count statistics per distinct value of `field` over `window`.
/// Months without claims count as zero. `None` when the window is empty or
/// holds no claims.
pub fn utilization_baselines(
    claims: &[ClaimRecord],
    field: ClaimField,
    window: MonthRange,
) -> Option<BTreeMap<String, UtilizationBaseline>> {
    if window.is_empty() {
        return None;
    }
    let mut counts: BTreeMap<String, BTreeMap<YearMonth, u64>> = BTreeMap::new();
    let mut keys: BTreeMap<String, ()> = BTreeMap::new();
    let mut any = false;
    for c in claims {
        let key = c.value(field).render();
        if key.is_empty() {
            continue;
        }
        keys.insert(key.clone(), ());
        let month = c.reported_month();
        if window.contains(month) {
            any = true;
            *counts.entry(key).or_default().entry(month).or_default() += 1;
        }
    }
    if !any {
        return None;
    }
    let n = window.len() as f64;
    let empty = BTreeMap::new();
    Some(
        keys.into_keys()
            .map(|key| {
                let per_month = counts.get(&key).unwrap_or(&empty);
                let values: Vec<f64> = window
                    .months()
                    .map(|m| per_month.get(&m).copied().unwrap_or(0) as f64)
                    .collect();
                let mean = values.iter().sum::<f64>() / n;
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
                (
                    key,
                    UtilizationBaseline {
                        mean,
                        sd: var.sqrt(),
                    },
                )
            })
            .collect(),
    )
}

/// Cross-claim indexes and the package utilization baseline. Index entries
/// are positions in the claim slice the context was built from.
#[derive(Debug, Clone)]
pub struct RuleContext {
    pub evaluation_date: NaiveDate,
    pub baseline_window: MonthRange,
    /// Default `k` for `utilization_excess` calls that do not give one.
    pub k: f64,
    claim_count: usize,
    by_insured: BTreeMap<String, Vec<usize>>,
    by_procedure: BTreeMap<String, Vec<usize>>,
    by_month: BTreeMap<YearMonth, Vec<usize>>,
    procedure_baseline: Option<BTreeMap<String, UtilizationBaseline>>,
}

pub const DEFAULT_K: f64 = 2.0;

/// Aug-2019 through Feb-2020, the months before the epidemic.
pub fn default_baseline_window() -> MonthRange {
    MonthRange::new(
        YearMonth::new(2019, 8).expect("valid month"),
        YearMonth::new(2020, 2).expect("valid month"),
    )
}

pub fn build_context(
    claims: &[ClaimRecord],
    evaluation_date: NaiveDate,
    baseline_window: MonthRange,
) -> RuleContext {
    let mut by_insured: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut by_procedure: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut by_month: BTreeMap<YearMonth, Vec<usize>> = BTreeMap::new();
    for (i, c) in claims.iter().enumerate() {
        by_insured.entry(c.insured_id.clone()).or_default().push(i);
        by_procedure
            .entry(c.procedure_code.clone())
            .or_default()
            .push(i);
        by_month.entry(c.reported_month()).or_default().push(i);
    }
    RuleContext {
        evaluation_date,
        baseline_window,
        k: DEFAULT_K,
        claim_count: claims.len(),
        by_insured,
        by_procedure,
        by_month,
        procedure_baseline: utilization_baselines(
            claims,
            ClaimField::ProcedureCode,
            baseline_window,
        ),
    }
}

impl RuleContext {
    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn claim_count(&self) -> usize {
        self.claim_count
    }

    pub fn by_insured(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.by_insured
    }

    pub fn by_procedure(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.by_procedure
    }

    pub fn by_month(&self) -> &BTreeMap<YearMonth, Vec<usize>> {
        &self.by_month
    }

    /// Groups of claims sharing insured_id and procedure_code, size ≥ 2.
    pub fn duplicate_packages(&self, claims: &[ClaimRecord]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for idx in self.by_insured.values() {
            let mut by_proc: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for &i in idx {
                by_proc
                    .entry(claims[i].procedure_code.as_str())
                    .or_default()
                    .push(i);
            }
            out.extend(by_proc.into_values().filter(|g| g.len() > 1));
        }
        out
    }

    /// Baseline for procedure codes; `None` when the window had no claims.
    pub fn procedure_baseline(&self) -> Option<&BTreeMap<String, UtilizationBaseline>> {
        self.procedure_baseline.as_ref()
    }

    /// Fails for the first rule that needs a utilization baseline the window cannot supply.
    pub fn validate_rules(
        &self,
        claims: &[ClaimRecord],
        rules: &[TriggerRule],
    ) -> Result<(), TriggerError> {
        for rule in rules {
            let mut fields = Vec::new();
            rule.expression.walk(&mut |e| {
                if let Expr::Call(Call::UtilizationExcess { field, .. }) = e {
                    fields.push(*field);
                }
            });
            for field in fields {
                let available = if field == ClaimField::ProcedureCode {
                    self.procedure_baseline.is_some()
                } else {
                    utilization_baselines(claims, field, self.baseline_window).is_some()
                };
                if !available {
                    return Err(TriggerError::EmptyBaseline {
                        rule_id: rule.id.clone(),
                        window: format!(
                            "{}..{}",
                            self.baseline_window.from, self.baseline_window.to
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}
