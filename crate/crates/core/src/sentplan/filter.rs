//! Structural and corpus-based plan filters.

use crate::corpus::CorpusStore;
use crate::realize::{realize_plan_tokens, Lexicon, RefExpr};
use crate::slots::{Number, PlanSlot, Role, SentencePlan};

const S_MARK: &str = "\u{1}S";
const O_MARK: &str = "\u{1}O";

/// At least three slots, a verb that is not first, one reference per role,
/// and not the reversed copula `O be S`.
pub fn structurally_valid(plan: &SentencePlan) -> bool {
    let slots = &plan.slots;
    if slots.len() < 3 || slots[0].is_verb() || plan.verb_count() == 0 {
        return false;
    }
    if plan.validate().is_err() {
        return false;
    }
    let reversed_copula = slots.len() == 3
        && matches!(slots[0], PlanSlot::Ref { role: Role::O, .. })
        && matches!(&slots[1], PlanSlot::Verb { lemma, .. } if lemma == "be")
        && matches!(slots[2], PlanSlot::Ref { role: Role::S, .. });
    !reversed_copula
}

/// Realized words between the two reference slots, one variant per number
/// combination of the references, plus contracted negation variants.
pub fn interior_variants(lex: &Lexicon, plan: &SentencePlan) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for s_num in [Number::Singular, Number::Plural] {
        for o_num in [Number::Singular, Number::Plural] {
            let tokens = realize_plan_tokens(lex, plan, &RefExpr::new(S_MARK, s_num), &RefExpr::new(O_MARK, o_num));
            let marks: Vec<usize> = tokens
                .iter()
                .enumerate()
                .filter(|(_, t)| *t == S_MARK || *t == O_MARK)
                .map(|(i, _)| i)
                .collect();
            let [a, b] = marks[..] else {
                continue;
            };
            let interior: Vec<String> = tokens[a + 1..b]
                .iter()
                .filter(|t| *t != "'s")
                .cloned()
                .collect();
            let contracted: Vec<String> = interior
                .iter()
                .map(|t| if t == "not" { "n't".to_string() } else { t.clone() })
                .collect();
            for v in [interior, contracted] {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// The interior phrase must occur in at least one document of `group`.
/// Plans whose references are adjacent have nothing to check and pass.
pub fn passes_phrase_filter(store: &CorpusStore, lex: &Lexicon, group: &str, plan: &SentencePlan) -> bool {
    let variants = interior_variants(lex, plan);
    if variants.iter().any(Vec::is_empty) {
        return true;
    }
    variants
        .iter()
        .any(|v| store.phrase_search(v, group).unwrap_or(0) >= 1)
}
