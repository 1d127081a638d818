//! Rule-set monotonicity and determinism over a corpus with natural violations.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use claimlens::claims::ClaimRecord;
use claimlens::synth::{generate, SynthConfig, PLANTABLE};
use claimlens::triggers::{
    build_context, builtin_rules, evaluate_rules, RuleContext, TriggerHit, TriggerRule,
};
use proptest::prelude::*;

struct Corpus {
    claims: Vec<ClaimRecord>,
    ctx: RuleContext,
    rules: Vec<TriggerRule>,
}

fn corpus() -> &'static Corpus {
    static C: OnceLock<Corpus> = OnceLock::new();
    C.get_or_init(|| {
        let plants: String = PLANTABLE
            .iter()
            .map(|r| format!("plant.{r}.2020-04 = 2\n"))
            .collect();
        let cfg = SynthConfig::parse(&format!(
            "seed = 21\nclaims.per_month = 150\nclaims.natural_rate = 0.02\n{plants}"
        ))
        .unwrap();
        let (_, claims, _) = generate(&cfg).unwrap();
        let ctx = build_context(&claims, cfg.evaluation_date, cfg.baseline);
        Corpus {
            claims,
            ctx,
            rules: builtin_rules(),
        }
    })
}

fn hits_for(mask: &[bool]) -> Vec<TriggerHit> {
    let c = corpus();
    let rules: Vec<TriggerRule> = c
        .rules
        .iter()
        .zip(mask)
        .filter(|(_, m)| **m)
        .map(|(r, _)| r.clone())
        .collect();
    evaluate_rules(&rules, &c.claims, &c.ctx)
}

fn key(hits: &[TriggerHit]) -> BTreeSet<(String, String)> {
    hits.iter()
        .map(|h| (h.claim_id.clone(), h.rule_id.clone()))
        .collect()
}

fn mask() -> impl Strategy<Value = (Vec<bool>, usize)> {
    let n = builtin_rules().len();
    (prop::collection::vec(any::<bool>(), n), 0..n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn adding_a_rule_never_shrinks_hits((m, extra) in mask()) {
        let before = key(&hits_for(&m));
        let mut grown = m.clone();
        grown[extra] = true;
        let after = key(&hits_for(&grown));
        prop_assert!(before.is_subset(&after));
        let flagged = |k: &BTreeSet<(String, String)>| k.iter().map(|(c, _)| c.clone()).collect::<BTreeSet<_>>();
        prop_assert!(flagged(&before).is_subset(&flagged(&after)));
    }

    #[test]
    fn rule_set_hits_are_union_of_single_rules((m, _) in mask()) {
        let together = key(&hits_for(&m));
        let mut union = BTreeSet::new();
        for i in (0..m.len()).filter(|&i| m[i]) {
            let mut single = vec![false; m.len()];
            single[i] = true;
            union.extend(key(&hits_for(&single)));
        }
        prop_assert_eq!(together, union);
    }

    #[test]
    fn rule_order_does_not_matter(seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let c = corpus();
        let mut shuffled = c.rules.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(evaluate_rules(&shuffled, &c.claims, &c.ctx), evaluate_rules(&c.rules, &c.claims, &c.ctx));
    }
}

#[test]
fn hits_are_sorted_and_unique() {
    let hits = hits_for(&vec![true; corpus().rules.len()]);
    assert!(!hits.is_empty());
    assert!(hits
        .windows(2)
        .all(|w| (&w[0].claim_id, &w[0].rule_id) < (&w[1].claim_id, &w[1].rule_id)));
}
