//! The 251-dimension feature vectors of candidate sentence plans.

mod hits;
mod lm;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{self, Write};

use crate::corpus::CorpusStore;
use crate::realize::{realize_plan_tokens, Lexicon, RefExpr};
use crate::sentplan::{CandidatePlan, Extraction};
use crate::slots::{Number, PlanSlot, Role, Voice, VerbForm};
use crate::text::{content_terms, cosine, IdfSource};

pub use hits::{count_hits, Field, HitCounters, HitEvent, ItemKey, Variant, PMI_VARIANTS, VARIANTS};
pub use lm::TrigramModel;

pub const PRODUCTIVITY_FEATURES: usize = 100;
pub const PROMINENCE_FEATURES: usize = 20;
pub const PMI_FEATURES: usize = 55;
pub const TOKEN_FEATURES: usize = 55;
pub const GRAMMAR_FEATURES: usize = 4;
pub const MISC_FEATURES: usize = 17;
pub const FEATURE_COUNT: usize =
    PRODUCTIVITY_FEATURES + PROMINENCE_FEATURES + PMI_FEATURES + TOKEN_FEATURES + GRAMMAR_FEATURES + MISC_FEATURES;

const STATS: [&str; 5] = ["max", "min", "avg", "total", "std"];

const TOKEN_VARIANTS: [&str; 11] = [
    "cos_n1_a1",
    "cos_n2_a2",
    "tokpmi_n1_a1",
    "tokpmi_n2_a2",
    "tokpmi_a1_t",
    "tokpmi_a2_t",
    "cos_t_r",
    "tokpmi_t_r",
    "tokpmi_a1_a2",
    "tokpmi_a1_a1",
    "tokpmi_a2_a2",
];

const BOOLEANS: [&str; 7] = [
    "lone_present_participle",
    "active_main_verb",
    "s_before_o",
    "subject_ref",
    "object_ref",
    "well_formed_sources",
    "repaired",
];

const MISC_COUNTS: [&str; 4] = ["slots", "slots_before_s", "slots_after_o", "slots_between"];

/// Names of all features in vector order.
pub fn feature_names() -> Vec<String> {
    let mut out = Vec::with_capacity(FEATURE_COUNT);
    for v in &VARIANTS {
        out.extend(STATS.iter().map(|s| format!("prod.{}.{s}", v.name)));
    }
    out.extend(VARIANTS.iter().map(|v| format!("prom.{}", v.name)));
    for (joint, _, _) in PMI_VARIANTS {
        out.extend(STATS.iter().map(|s| format!("pmi.{}.{s}", VARIANTS[joint].name)));
    }
    for v in TOKEN_VARIANTS {
        out.extend(STATS.iter().map(|s| format!("tok.{v}.{s}")));
    }
    out.extend(["max", "min", "avg", "std"].iter().map(|s| format!("gram.{s}")));
    out.extend(BOOLEANS.iter().map(|b| format!("misc.{b}")));
    out.extend(MISC_COUNTS.iter().map(|c| format!("misc.{c}")));
    out.extend(STATS.iter().map(|s| format!("misc.page_rank.{s}")));
    out.push("misc.pages".to_string());
    out
}

/// True for the boolean features, which are left as 0/1 by normalization.
pub fn is_boolean(index: usize) -> bool {
    let start = FEATURE_COUNT - MISC_FEATURES;
    (start..start + BOOLEANS.len()).contains(&index)
}

/// max, min, avg, total and population std; zeros for no values.
pub fn five_stats(values: &[f64]) -> [f64; 5] {
    if values.is_empty() {
        return [0.0; 5];
    }
    let n = values.len() as f64;
    let total: f64 = values.iter().sum();
    let avg = total / n;
    let var = values.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / n;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    [max, min, avg, total, var.sqrt()]
}

/// Normalized PMI from a joint and two marginal probabilities. A joint of 1
/// scores 1 and a joint of 0 scores -1.
pub fn normalized_pmi(joint: f64, first: f64, second: f64) -> f64 {
    if joint >= 1.0 {
        return 1.0;
    }
    if joint <= 0.0 || first <= 0.0 || second <= 0.0 {
        return -1.0;
    }
    ((joint / (first * second)).ln() / -joint.ln()).clamp(-1.0, 1.0)
}

/// Sentence-level term probabilities of a group, Laplace smoothed: a term
/// (or pair of terms) found in `c` of `L` sentences over a vocabulary of `V`
/// terms has probability `(c + 1) / (L + V)`.
#[derive(Debug, Clone)]
pub struct TokenStats {
    sentences: Vec<HashSet<String>>,
    counts: BTreeMap<String, usize>,
}

impl TokenStats {
    pub fn new(store: &CorpusStore, group: &str) -> Self {
        let sentences: Vec<HashSet<String>> = store
            .group_sentences(group)
            .into_iter()
            .map(|id| {
                let sent = store.sentence(id);
                content_terms(&sent.surfaces(0..sent.tokens.len())).into_iter().collect()
            })
            .collect();
        let mut counts = BTreeMap::new();
        for s in &sentences {
            for t in s {
                *counts.entry(t.clone()).or_default() += 1;
            }
        }
        Self { sentences, counts }
    }

    fn denominator(&self) -> f64 {
        (self.sentences.len() + self.counts.len()) as f64
    }

    pub fn prob(&self, term: &str) -> f64 {
        (self.counts.get(term).copied().unwrap_or(0) + 1) as f64 / self.denominator()
    }

    pub fn joint(&self, a: &str, b: &str) -> f64 {
        let c = if a == b {
            self.counts.get(a).copied().unwrap_or(0)
        } else {
            self.sentences
                .iter()
                .filter(|s| s.contains(a) && s.contains(b))
                .count()
        };
        (c + 1) as f64 / self.denominator()
    }

    /// Average normalized PMI over all term pairs of the two phrases.
    pub fn avg_tok_pmi<S: AsRef<str>, T: AsRef<str>>(&self, x: &[S], y: &[T]) -> f64 {
        let xs = content_terms(x);
        let ys = content_terms(y);
        if xs.is_empty() || ys.is_empty() {
            return 0.0;
        }
        let mut sum = 0.0;
        for a in &xs {
            for b in &ys {
                sum += normalized_pmi(self.joint(a, b), self.prob(a), self.prob(b));
            }
        }
        sum / (xs.len() * ys.len()) as f64
    }
}

/// Everything shared by the candidates of one relation.
pub struct RelationContext<'a> {
    pub store: &'a CorpusStore,
    pub lex: &'a Lexicon,
    pub extraction: &'a Extraction,
    /// Tokenized relation identifier, e.g. `made from`.
    pub relation_tokens: Vec<String>,
    pub counters: HitCounters,
    pub tokens: TokenStats,
    pub model: TrigramModel,
}

impl<'a> RelationContext<'a> {
    pub fn new(store: &'a CorpusStore, lex: &'a Lexicon, extraction: &'a Extraction, relation_tokens: Vec<String>) -> Self {
        let group = extraction.group.as_str();
        let sentences: Vec<Vec<String>> = store
            .group_sentences(group)
            .into_iter()
            .map(|id| {
                let s = store.sentence(id);
                s.surfaces(0..s.tokens.len())
            })
            .collect();
        Self {
            store,
            lex,
            extraction,
            relation_tokens,
            counters: count_hits(store, extraction),
            tokens: TokenStats::new(store, group),
            model: TrigramModel::train(&sentences),
        }
    }

    /// Seed pairs that contributed to at least one candidate plan.
    pub fn usable_seeds(&self) -> Vec<usize> {
        let templates: BTreeSet<usize> = self
            .extraction
            .plans
            .iter()
            .flat_map(|p| p.templates.iter().copied())
            .collect();
        self.counters
            .events
            .iter()
            .filter(|e| templates.contains(&e.template))
            .map(|e| e.seed)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

/// Raw (unnormalized) features of one relation's candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub group: String,
    pub rows: Vec<Vec<f64>>,
    /// No seed pair produced a plan, so grammaticality features are zero.
    pub grammar_unavailable: bool,
}

fn productivity_features(c: &HitCounters, templates: &[usize], out: &mut Vec<f64>) {
    for v in 0..VARIANTS.len() {
        let values: Vec<f64> = c
            .items_of(v, templates)
            .iter()
            .map(|k| c.productivity(v, k))
            .collect();
        out.extend(five_stats(&values));
    }
}

fn prominence_features(c: &HitCounters, templates: &[usize], out: &mut Vec<f64>) {
    for v in 0..VARIANTS.len() {
        let denom = c.productive_items(v);
        let num = c
            .items_of(v, templates)
            .iter()
            .filter(|k| c.hits(v, k) > 0.0)
            .count();
        out.push(if denom == 0 { 0.0 } else { num as f64 / denom as f64 });
    }
}

fn pmi_features(c: &HitCounters, templates: &[usize], out: &mut Vec<f64>) {
    for (joint, first, second) in PMI_VARIANTS {
        let mut seen: BTreeSet<ItemKey> = BTreeSet::new();
        let mut values = Vec::new();
        for e in c.events_of(templates) {
            let key = c.key(e, joint);
            if !seen.insert(key.clone()) {
                continue;
            }
            values.push(normalized_pmi(
                c.productivity(joint, &key),
                c.productivity(first, &c.key(e, first)),
                c.productivity(second, &c.key(e, second)),
            ));
        }
        out.extend(five_stats(&values));
    }
}

fn words(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

fn token_features(ctx: &RelationContext<'_>, templates: &[usize], out: &mut Vec<f64>) {
    let c = &ctx.counters;
    let ex = ctx.extraction;
    let idf = ctx.store.idf(&ex.group);
    let idf: &dyn IdfSource = &idf;
    let name = |id: usize| words(c.names.get(id));
    let anchor = |id: usize| words(c.anchors.get(id));
    let template_words = |k: usize| ex.templates[k].words();

    let distinct = |fields: [Field; 2]| -> BTreeSet<(usize, usize)> {
        c.events_of(templates)
            .map(|e| (c.field(e, fields[0]), c.field(e, fields[1])))
            .collect()
    };
    let n1a1 = distinct([Field::N1, Field::A1]);
    let n2a2 = distinct([Field::N2, Field::A2]);
    let a1t = distinct([Field::A1, Field::Template]);
    let a2t = distinct([Field::A2, Field::Template]);
    let ap: BTreeSet<(String, String)> = c
        .events_of(templates)
        .map(|e| c.anchor_pairs.get(c.field(e, Field::AnchorPair)).clone())
        .collect();
    let a1s: BTreeSet<usize> = c.events_of(templates).map(|e| c.field(e, Field::A1)).collect();
    let a2s: BTreeSet<usize> = c.events_of(templates).map(|e| c.field(e, Field::A2)).collect();
    let ts: BTreeSet<usize> = templates.iter().copied().collect();
    let r = &ctx.relation_tokens;
    let tk = &ctx.tokens;

    let groups: [Vec<f64>; 11] = [
        n1a1.iter().map(|&(n, a)| cosine(&name(n), &anchor(a), idf)).collect(),
        n2a2.iter().map(|&(n, a)| cosine(&name(n), &anchor(a), idf)).collect(),
        n1a1.iter().map(|&(n, a)| tk.avg_tok_pmi(&name(n), &anchor(a))).collect(),
        n2a2.iter().map(|&(n, a)| tk.avg_tok_pmi(&name(n), &anchor(a))).collect(),
        a1t.iter().map(|&(a, t)| tk.avg_tok_pmi(&anchor(a), &template_words(t))).collect(),
        a2t.iter().map(|&(a, t)| tk.avg_tok_pmi(&anchor(a), &template_words(t))).collect(),
        ts.iter().map(|&t| cosine(&template_words(t), r, idf)).collect(),
        ts.iter().map(|&t| tk.avg_tok_pmi(&template_words(t), r)).collect(),
        ap.iter().map(|(a1, a2)| tk.avg_tok_pmi(&words(a1), &words(a2))).collect(),
        a1s.iter().map(|&a| tk.avg_tok_pmi(&anchor(a), &anchor(a))).collect(),
        a2s.iter().map(|&a| tk.avg_tok_pmi(&anchor(a), &anchor(a))).collect(),
    ];
    for g in &groups {
        out.extend(five_stats(g));
    }
}

fn grammar_features(ctx: &RelationContext<'_>, plan: &CandidatePlan, usable: &[usize], out: &mut Vec<f64>) {
    let scores: Vec<f64> = usable
        .iter()
        .map(|&i| {
            let seed = &ctx.extraction.seeds[i];
            let s = RefExpr::new(seed.n1.join(" "), Number::Singular);
            let o = RefExpr::new(seed.n2.join(" "), Number::Singular);
            let tokens = realize_plan_tokens(ctx.lex, &plan.plan, &s, &o);
            let words: Vec<&String> = tokens.iter().filter(|t| t.chars().any(char::is_alphanumeric)).collect();
            ctx.model.score(&words)
        })
        .collect();
    let [max, min, avg, _, std] = five_stats(&scores);
    out.extend([max, min, avg, std]);
}

fn misc_features(ctx: &RelationContext<'_>, plan: &CandidatePlan, out: &mut Vec<f64>) {
    let ex = ctx.extraction;
    let slots = &plan.plan.slots;
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    let lone_participle = slots
        .iter()
        .any(|s| matches!(s, PlanSlot::Verb { form: VerbForm::PresentParticiple, .. }));
    let active = slots.iter().any(|s| {
        matches!(
            s,
            PlanSlot::Verb {
                voice: Voice::Active,
                form: VerbForm::Finite | VerbForm::Progressive,
                ..
            }
        )
    });
    let si = plan.plan.ref_index(Role::S);
    let oi = plan.plan.ref_index(Role::O);
    let sentences: BTreeSet<_> = plan
        .templates
        .iter()
        .flat_map(|&k| ex.templates[k].instances.iter())
        .map(|inst| ex.occurrences[inst.occurrence].sentence)
        .collect();
    let well_formed = sentences.iter().all(|&id| ctx.store.sentence(id).well_formed);
    out.extend([
        flag(lone_participle),
        flag(active),
        flag(matches!((si, oi), (Some(s), Some(o)) if s < o)),
        flag(plan.subject_ref),
        flag(plan.object_ref),
        flag(well_formed),
        flag(plan.repaired),
    ]);
    let (s, o) = (si.unwrap_or(0), oi.unwrap_or(0));
    out.extend([
        slots.len() as f64,
        s as f64,
        slots.len().saturating_sub(o + 1) as f64,
        s.abs_diff(o).saturating_sub(1) as f64,
    ]);
    let docs: BTreeSet<usize> = sentences.iter().map(|id| id.doc).collect();
    let ranks: Vec<f64> = docs.iter().map(|&d| ctx.store.document(d).rank as f64).collect();
    out.extend(five_stats(&ranks));
    out.push(docs.len() as f64);
}

/// Unnormalized feature vector of one candidate.
pub fn plan_features(ctx: &RelationContext<'_>, plan: &CandidatePlan, usable: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(FEATURE_COUNT);
    let c = &ctx.counters;
    productivity_features(c, &plan.templates, &mut out);
    prominence_features(c, &plan.templates, &mut out);
    pmi_features(c, &plan.templates, &mut out);
    token_features(ctx, &plan.templates, &mut out);
    grammar_features(ctx, plan, usable, &mut out);
    misc_features(ctx, plan, &mut out);
    debug_assert_eq!(out.len(), FEATURE_COUNT);
    out
}

/// Raw features of all candidates of an extraction.
pub fn extraction_features(ctx: &RelationContext<'_>) -> FeatureTable {
    let usable = ctx.usable_seeds();
    let rows = ctx
        .extraction
        .plans
        .iter()
        .map(|p| plan_features(ctx, p, &usable))
        .collect();
    FeatureTable {
        group: ctx.extraction.group.clone(),
        rows,
        grammar_unavailable: usable.is_empty(),
    }
}

/// Min-max scales every non-boolean column over the rows of one relation;
/// a constant column becomes 0.
pub fn normalize(rows: &mut [Vec<f64>]) {
    let Some(width) = rows.first().map(Vec::len) else {
        return;
    };
    for j in (0..width).filter(|&j| !is_boolean(j)) {
        let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r[j]), hi.max(r[j]))
        });
        for r in rows.iter_mut() {
            r[j] = if hi > lo { (r[j] - lo) / (hi - lo) } else { 0.0 };
        }
    }
}

/// Feature dump: a header of feature names, then one line per candidate
/// with its id and values, tab separated.
pub fn write_tsv<W: Write>(mut w: W, records: &[(String, Vec<f64>)]) -> io::Result<()> {
    writeln!(w, "id\t{}", feature_names().join("\t"))?;
    for (id, values) in records {
        let cells: Vec<String> = values.iter().map(|v| format!("{v}")).collect();
        writeln!(w, "{id}\t{}", cells.join("\t"))?;
    }
    Ok(())
}

/// Feature groups in schema order with their sizes.
pub const GROUPS: [(&str, usize); 6] = [
    ("productivity", PRODUCTIVITY_FEATURES),
    ("prominence", PROMINENCE_FEATURES),
    ("pmi", PMI_FEATURES),
    ("token", TOKEN_FEATURES),
    ("grammaticality", GRAMMAR_FEATURES),
    ("misc", MISC_FEATURES),
];

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GroupSummary {
    pub group: &'static str,
    pub max: f64,
    pub min: f64,
    pub avg: f64,
}

/// Max, min and mean of per-feature scores (e.g. information gain) within
/// each feature group.
pub fn group_summary(values: &[f64]) -> Vec<GroupSummary> {
    let mut start = 0;
    GROUPS
        .iter()
        .map(|&(group, len)| {
            let end = (start + len).min(values.len());
            let slice = &values[start.min(end)..end];
            start += len;
            if slice.is_empty() {
                return GroupSummary {
                    group,
                    max: 0.0,
                    min: 0.0,
                    avg: 0.0,
                };
            }
            GroupSummary {
                group,
                max: slice.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                min: slice.iter().copied().fold(f64::INFINITY, f64::min),
                avg: slice.iter().sum::<f64>() / slice.len() as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_summaries() {
        let mut ig = vec![0.0; FEATURE_COUNT];
        ig[0] = 0.5;
        ig[99] = 0.1;
        ig[FEATURE_COUNT - 1] = 0.3;
        let s = group_summary(&ig);
        assert_eq!(s.len(), 6);
        assert_eq!(s[0].group, "productivity");
        assert_eq!((s[0].max, s[0].min), (0.5, 0.0));
        assert!((s[0].avg - 0.006).abs() < 1e-12);
        assert_eq!(s[5].max, 0.3);
        assert_eq!(s[1].max, 0.0);
        assert_eq!(GROUPS.iter().map(|g| g.1).sum::<usize>(), FEATURE_COUNT);
    }

    #[test]
    fn schema_sizes() {
        assert_eq!(FEATURE_COUNT, 251);
        let names = feature_names();
        assert_eq!(names.len(), 251);
        assert_eq!(names.iter().collect::<BTreeSet<_>>().len(), 251);
        assert_eq!(names[0], "prod.pair.max");
        assert_eq!(names[100], "prom.pair");
        assert_eq!(names[120], "pmi.pair.max");
        assert_eq!(names[175], "tok.cos_n1_a1.max");
        assert_eq!(names[230], "gram.max");
        assert_eq!(names[234], "misc.lone_present_participle");
        assert!(is_boolean(234) && is_boolean(240) && !is_boolean(241) && !is_boolean(233));
    }

    #[test]
    fn stats_and_pmi() {
        assert_eq!(five_stats(&[0.5]), [0.5, 0.5, 0.5, 0.5, 0.0]);
        assert_eq!(five_stats(&[]), [0.0; 5]);
        let s = five_stats(&[1.0, 3.0]);
        assert_eq!(s, [3.0, 1.0, 2.0, 4.0, 1.0]);
        assert_eq!(normalized_pmi(1.0, 1.0, 1.0), 1.0);
        assert_eq!(normalized_pmi(0.0, 0.3, 0.3), -1.0);
        assert!(normalized_pmi(0.25, 0.5, 0.5).abs() < 1e-12);
        assert!((normalized_pmi(0.4, 0.4, 1.0) - 0.0).abs() < 1e-12);
        assert!((normalized_pmi(0.3, 0.3, 0.3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalization_scales_columns() {
        let mut rows = vec![vec![0.0; FEATURE_COUNT], vec![0.0; FEATURE_COUNT], vec![0.0; FEATURE_COUNT]];
        rows[0][0] = 2.0;
        rows[1][0] = 4.0;
        rows[2][0] = 3.0;
        rows[0][234] = 1.0;
        for r in rows.iter_mut() {
            r[5] = 7.0;
        }
        normalize(&mut rows);
        assert_eq!([rows[0][0], rows[1][0], rows[2][0]], [0.0, 1.0, 0.5]);
        assert_eq!(rows[0][5], 0.0);
        assert_eq!(rows[0][234], 1.0);
    }
}
