//! Ranking of candidate plans: classifier probability (SP), probability
//! times coverage over the top ten (SP*), and the bootstrapping baseline.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{AnnotatedSentence, CorpusStore, NpSpan, SentenceId};
use crate::realize::{realize_plan_tokens, Lexicon, RefExpr};
use crate::sentplan::{
    extract_from_seeds, template_to_plan, AnchorOccurrence, ExtractConfig, PlanError, SeedPair, Template,
    TemplateToken,
};
use crate::slots::{Number, SentencePlan};

/// Candidates re-scored by SP*.
pub const RERANK_DEPTH: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum RankError {
    #[error("k must be at least 1")]
    ZeroK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Sp,
    SpStar,
    Boot,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Sp => "sp",
            Method::SpStar => "sp-star",
            Method::Boot => "boot",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sp" => Ok(Method::Sp),
            "sp-star" | "sp*" => Ok(Method::SpStar),
            "boot" => Ok(Method::Boot),
            other => Err(format!("unknown ranking method {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    /// Index of the candidate in its extraction.
    pub id: usize,
    pub probability: f64,
    pub coverage: Option<f64>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub relation: String,
    pub method: Method,
    pub candidates: Vec<RankedCandidate>,
}

/// Orders candidates by decreasing probability, ties by id.
pub fn rank_sp(relation: &str, probabilities: &[f64]) -> Ranking {
    let mut candidates: Vec<RankedCandidate> = probabilities
        .iter()
        .enumerate()
        .map(|(id, &p)| RankedCandidate {
            id,
            probability: p,
            coverage: None,
            score: p,
        })
        .collect();
    candidates.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.id.cmp(&b.id)));
    Ranking {
        relation: relation.to_string(),
        method: Method::Sp,
        candidates,
    }
}

/// Re-scores the first [`RERANK_DEPTH`] candidates of an SP ranking by
/// probability times coverage and re-orders them among themselves (ties keep
/// their SP order). Later candidates keep their positions and scores.
pub fn rank_sp_star(sp: &Ranking, mut coverage: impl FnMut(usize) -> f64) -> Ranking {
    let depth = sp.candidates.len().min(RERANK_DEPTH);
    let mut head: Vec<(usize, RankedCandidate)> = sp.candidates[..depth]
        .iter()
        .enumerate()
        .map(|(pos, c)| {
            let cov = coverage(c.id);
            (
                pos,
                RankedCandidate {
                    coverage: Some(cov),
                    score: c.probability * cov,
                    ..c.clone()
                },
            )
        })
        .collect();
    head.sort_by(|a, b| b.1.score.total_cmp(&a.1.score).then(a.0.cmp(&b.0)));
    let mut candidates: Vec<RankedCandidate> = head.into_iter().map(|(_, c)| c).collect();
    candidates.extend(sp.candidates[depth..].iter().cloned());
    Ranking {
        relation: sp.relation.clone(),
        method: Method::SpStar,
        candidates,
    }
}

/// The first `k` candidates.
pub fn select_top(ranking: &Ranking, k: usize) -> Result<&[RankedCandidate], RankError> {
    if k == 0 {
        return Err(RankError::ZeroK);
    }
    Ok(&ranking.candidates[..k.min(ranking.candidates.len())])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageEntry {
    pub seed: usize,
    pub sentence: String,
    /// Documents containing the sentence verbatim.
    pub hits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub entries: Vec<CoverageEntry>,
    pub coverage: f64,
}

/// Number variants of a seed name: as given, and with its last word in
/// singular and in plural form.
fn name_variants(lex: &Lexicon, name: &[String]) -> Vec<RefExpr> {
    let mut out = vec![RefExpr::new(name.join(" "), Number::Singular)];
    if let Some((last, rest)) = name.split_last() {
        let singular = lex.singular(last);
        for (word, number) in [(lex.plural(&singular), Number::Plural), (singular, Number::Singular)] {
            let mut words = rest.to_vec();
            words.push(word);
            let text = words.join(" ");
            if out.iter().all(|r| !r.text.eq_ignore_ascii_case(&text)) {
                out.push(RefExpr::new(text, number));
            }
        }
    }
    out
}

fn phrase_tokens(lex: &Lexicon, plan: &SentencePlan, s: &RefExpr, o: &RefExpr) -> Vec<String> {
    let mut tokens = realize_plan_tokens(lex, plan, s, o);
    while tokens.last().is_some_and(|t| !t.chars().any(char::is_alphanumeric)) {
        tokens.pop();
    }
    tokens
}

/// Realizes `plan` for each seed pair, with the seed names standing in for
/// referring expressions, and phrase-searches the sentence in `group`.
/// Each name is also tried with its last word in singular and plural form.
/// Coverage is the share of seed pairs with a sentence found.
pub fn coverage(store: &CorpusStore, lex: &Lexicon, group: &str, plan: &SentencePlan, seeds: &[SeedPair]) -> CoverageReport {
    let entries: Vec<CoverageEntry> = seeds
        .iter()
        .enumerate()
        .map(|(seed, pair)| {
            let firsts = name_variants(lex, &pair.n1);
            let seconds = name_variants(lex, &pair.n2);
            let mut tried: Option<CoverageEntry> = None;
            for s in &firsts {
                for o in &seconds {
                    let tokens = phrase_tokens(lex, plan, s, o);
                    let hits = store.phrase_search(&tokens, group).unwrap_or(0);
                    if tried.is_none() || hits > 0 {
                        tried = Some(CoverageEntry {
                            seed,
                            sentence: tokens.join(" "),
                            hits,
                        });
                    }
                    if hits > 0 {
                        return tried.expect("just set");
                    }
                }
            }
            tried.expect("at least one variant")
        })
        .collect();
    let covered = entries.iter().filter(|e| e.hits > 0).count();
    let coverage = if seeds.is_empty() {
        0.0
    } else {
        covered as f64 / seeds.len() as f64
    };
    CoverageReport { entries, coverage }
}

/// Template confidence: `hits / (hits + misses) * ln(finds)`, 0 when nothing
/// was found or no anchor pair exists.
pub fn bootstrap_conf(hits: usize, misses: usize, finds: usize) -> f64 {
    if hits == 0 || finds == 0 {
        return 0.0;
    }
    hits as f64 / (hits + misses) as f64 * (finds as f64).ln()
}

fn matches_from(sent: &AnnotatedSentence, tokens: &[TemplateToken], pos: usize) -> bool {
    let Some((first, rest)) = tokens.split_first() else {
        return true;
    };
    match first {
        TemplateToken::Word(w) => {
            pos < sent.tokens.len()
                && sent.tokens[pos].surface.eq_ignore_ascii_case(w)
                && matches_from(sent, rest, pos + 1)
        }
        TemplateToken::S | TemplateToken::O => sent
            .np_spans
            .iter()
            .filter(|s| s.start == pos && !s.is_empty())
            .any(|s| matches_from(sent, rest, s.end)),
    }
}

/// True when the template occurs in the sentence with each placeholder
/// filling a noun phrase.
pub fn template_matches(sent: &AnnotatedSentence, template: &Template) -> bool {
    (0..sent.tokens.len()).any(|start| matches_from(sent, &template.tokens, start))
}

#[derive(Debug, Clone)]
pub struct BootConfig {
    /// Stop once this many templates exist.
    pub target: usize,
    pub extract: ExtractConfig,
    pub max_iterations: usize,
}

impl Default for BootConfig {
    fn default() -> Self {
        Self {
            target: 150,
            extract: ExtractConfig::default(),
            max_iterations: 20,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BootTemplate {
    pub template: Template,
    pub hits: usize,
    pub misses: usize,
    pub finds: usize,
    pub conf: f64,
}

#[derive(Debug, Clone)]
pub struct BootResult {
    pub seeds: Vec<SeedPair>,
    pub occurrences: Vec<AnchorOccurrence>,
    /// In extraction order; see [`BootResult::ranked`].
    pub templates: Vec<BootTemplate>,
    pub iterations: usize,
}

impl BootResult {
    /// Template indices by decreasing confidence, ties by index.
    pub fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.templates.len()).collect();
        idx.sort_by(|&a, &b| {
            self.templates[b]
                .conf
                .total_cmp(&self.templates[a].conf)
                .then(a.cmp(&b))
        });
        idx
    }
}

fn distinct_documents(t: &Template, occurrences: &[AnchorOccurrence]) -> usize {
    t.instances
        .iter()
        .map(|i| occurrences[i.occurrence].sentence.doc)
        .collect::<BTreeSet<_>>()
        .len()
}

fn adjacent_span(sent: &AnnotatedSentence, boundary: usize, before: bool) -> Option<NpSpan> {
    let touching = |s: &&NpSpan| if before { s.end == boundary } else { s.start == boundary };
    let mut spans: Vec<&NpSpan> = sent.np_spans.iter().filter(touching).collect();
    // Prefer base phrases, then the longest.
    spans.sort_by_key(|s| (!s.base, std::cmp::Reverse(s.len())));
    spans.first().map(|s| **s)
}

/// Surface words of a harvested pair and the documents it was seen in.
type Harvest = (Vec<String>, Vec<String>, BTreeSet<usize>);

/// New seed pairs from the noun phrases around each phrase-search hit of
/// the template interiors, kept when found in at least two documents.
fn harvest_pairs(store: &CorpusStore, group: &str, templates: &[Template], known: &[SeedPair]) -> Vec<SeedPair> {
    let mut found: std::collections::BTreeMap<(String, String), Harvest> = Default::default();
    let mut phrases: BTreeSet<Vec<String>> = BTreeSet::new();
    for t in templates {
        let interior: Vec<String> = t.interior().iter().map(|w| w.to_lowercase()).collect();
        if !interior.is_empty() {
            phrases.insert(interior);
        }
    }
    for phrase in &phrases {
        for (sid, start) in store.phrase_occurrences(phrase, group) {
            let sent = store.sentence(sid);
            let (Some(left), Some(right)) = (
                adjacent_span(sent, start, true),
                adjacent_span(sent, start + phrase.len(), false),
            ) else {
                continue;
            };
            let n1 = sent.surfaces(left.start..left.end);
            let n2 = sent.surfaces(right.start..right.end);
            let key = (n1.join(" ").to_lowercase(), n2.join(" ").to_lowercase());
            found.entry(key).or_insert_with(|| (n1, n2, BTreeSet::new())).2.insert(sid.doc);
        }
    }
    let known: BTreeSet<(String, String)> = known.iter().map(SeedPair::key).collect();
    found
        .into_iter()
        .filter(|(key, (_, _, docs))| docs.len() >= 2 && !known.contains(key))
        .map(|(_, (n1, n2, _))| SeedPair::new(n1, n2))
        .collect()
}

/// Bootstrapping template extraction: templates from the seed pairs, then,
/// while fewer than `target` templates exist, new seed pairs from the noun
/// phrases around template phrase matches and templates from those.
/// Templates and new pairs seen in a single document are discarded.
pub fn bootstrap_extract(
    store: &CorpusStore,
    lex: &Lexicon,
    group: &str,
    seeds: Vec<SeedPair>,
    config: &BootConfig,
) -> Result<BootResult, PlanError> {
    let mut seeds = seeds;
    let mut iterations = 0;
    let (occurrences, templates) = loop {
        iterations += 1;
        let ex = extract_from_seeds(store, lex, group, seeds.clone(), &config.extract)?;
        let templates: Vec<Template> = ex
            .templates
            .into_iter()
            .filter(|t| distinct_documents(t, &ex.occurrences) >= 2)
            .collect();
        if templates.len() >= config.target || iterations >= config.max_iterations {
            break (ex.occurrences, templates);
        }
        let new = harvest_pairs(store, group, &templates, &seeds);
        if new.is_empty() {
            break (ex.occurrences, templates);
        }
        seeds.extend(new);
    };

    let all_pairs: BTreeSet<(String, String)> = occurrences.iter().map(|o| o.anchor_texts(store)).collect();
    let sentences: Vec<SentenceId> = store.group_sentences(group);
    let scored = templates
        .into_iter()
        .map(|template| {
            let extracted: BTreeSet<(String, String)> = template
                .instances
                .iter()
                .map(|i| occurrences[i.occurrence].anchor_texts(store))
                .collect();
            let hits = extracted.len();
            let misses = all_pairs.len() - hits;
            let finds = sentences
                .iter()
                .filter(|&&id| template_matches(store.sentence(id), &template))
                .count();
            BootTemplate {
                conf: bootstrap_conf(hits, misses, finds),
                template,
                hits,
                misses,
                finds,
            }
        })
        .collect();
    Ok(BootResult {
        seeds,
        occurrences,
        templates: scored,
        iterations,
    })
}

/// Plans of the `k` most confident templates, skipping templates that do not
/// convert.
pub fn boot_plans(
    store: &CorpusStore,
    lex: &Lexicon,
    group: &str,
    result: &BootResult,
    k: usize,
) -> Vec<(usize, SentencePlan)> {
    let mut out = Vec::new();
    for idx in result.ranked() {
        if out.len() >= k {
            break;
        }
        let template = &result.templates[idx].template;
        if let Ok(draft) = template_to_plan(store, lex, group, template, &result.occurrences) {
            out.push((idx, draft.plan));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CorpusBuilder, CorpusConfig};

    #[test]
    fn sp_orders_by_probability_then_id() {
        let r = rank_sp("r", &[0.9, 0.3, 0.7]);
        let ids: Vec<usize> = r.candidates.iter().map(|c| c.id).collect();
        assert_eq!(ids, [0, 2, 1]);
        let r = rank_sp("r", &[0.5, 0.5, 0.5]);
        let ids: Vec<usize> = r.candidates.iter().map(|c| c.id).collect();
        assert_eq!(ids, [0, 1, 2]);
        assert!(rank_sp("r", &[]).candidates.is_empty());
    }

    #[test]
    fn sp_star_reorders_top_ten_only() {
        let sp = rank_sp("r", &[0.9, 0.8]);
        let star = rank_sp_star(&sp, |id| if id == 0 { 0.0 } else { 1.0 });
        let ids: Vec<usize> = star.candidates.iter().map(|c| c.id).collect();
        assert_eq!(ids, [1, 0]);

        let probs: Vec<f64> = (0..12).map(|i| 1.0 - i as f64 * 0.05).collect();
        let sp = rank_sp("r", &probs);
        let same = rank_sp_star(&sp, |_| 0.5);
        let ids: Vec<usize> = same.candidates.iter().map(|c| c.id).collect();
        assert_eq!(ids, (0..12).collect::<Vec<_>>());
        let flipped = rank_sp_star(&sp, |id| id as f64);
        let ids: Vec<usize> = flipped.candidates.iter().map(|c| c.id).collect();
        assert_eq!(&ids[10..], [10, 11]);
        assert_eq!(ids[0], 9);
        assert_eq!(flipped.candidates[11].coverage, None);
    }

    #[test]
    fn select_top_bounds() {
        let r = rank_sp("r", &[0.2, 0.4, 0.1]);
        assert_eq!(select_top(&r, 1).unwrap().len(), 1);
        assert_eq!(select_top(&r, 1).unwrap()[0].id, 1);
        assert_eq!(select_top(&r, 5).unwrap().len(), 3);
        assert_eq!(select_top(&r, 0), Err(RankError::ZeroK));
    }

    #[test]
    fn conf_formula() {
        assert!((bootstrap_conf(3, 1, 10) - 0.75 * 10f64.ln()).abs() < 1e-12);
        assert!((bootstrap_conf(3, 1, 10) - 1.7269).abs() < 1e-4);
        assert_eq!(bootstrap_conf(0, 4, 10), 0.0);
        assert_eq!(bootstrap_conf(2, 0, 1), 0.0);
        assert_eq!(bootstrap_conf(2, 0, 0), 0.0);
    }

    fn wine_store() -> CorpusStore {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/wine/corpus.txt");
        let mut b = CorpusBuilder::new(CorpusConfig::default());
        b.ingest(path, "default").unwrap();
        b.freeze()
    }

    fn pair(a: &str, b: &str) -> SeedPair {
        SeedPair::new(
            a.split(' ').map(str::to_string).collect(),
            b.split(' ').map(str::to_string).collect(),
        )
    }

    fn made_from_plan(store: &CorpusStore) -> SentencePlan {
        let lex = Lexicon::shared();
        let ex = extract_from_seeds(
            store,
            lex,
            ":madeFrom",
            vec![pair("St. Emilion", "Cabernet Sauvignon grape"), pair("Semillon", "Semillon grape")],
            &ExtractConfig::default(),
        )
        .unwrap();
        let s = RefExpr::new("X", Number::Singular);
        let o = RefExpr::new("Y", Number::Singular);
        ex.plans
            .into_iter()
            .map(|c| c.plan)
            .find(|p| realize_plan_tokens(lex, p, &s, &o).join(" ") == "X is made from Y")
            .expect("base plan")
    }

    #[test]
    fn coverage_counts_found_sentences() {
        let store = wine_store();
        let plan = made_from_plan(&store);
        let seeds = [
            pair("gasoline", "petroleum"),
            pair("Semillon", "Semillon grape"),
            pair("St. Emilion", "Cabernet Sauvignon grapes"),
            pair("wine", "grapes"),
            pair("beer", "barley"),
        ];
        let report = coverage(&store, Lexicon::shared(), ":madeFrom", &plan, &seeds);
        assert!((report.coverage - 0.6).abs() < 1e-12, "{report:?}");
        assert_eq!(report.entries[0].hits, 2);
        assert_eq!(report.entries[4].hits, 0);
        assert_eq!(report.entries[1].sentence, "Semillon is made from Semillon grapes");
        assert_eq!(report.entries[3].sentence, "wine is made from grapes");
        assert_eq!(coverage(&store, Lexicon::shared(), ":madeFrom", &plan, &[]).coverage, 0.0);
    }

    #[test]
    fn bootstrap_harvests_new_pairs() {
        let store = wine_store();
        let lex = Lexicon::shared();
        let seeds = vec![pair("St. Emilion", "Cabernet Sauvignon grape"), pair("Semillon", "Semillon grape")];
        let result = bootstrap_extract(&store, lex, ":madeFrom", seeds.clone(), &BootConfig::default()).unwrap();
        let keys: Vec<(String, String)> = result.seeds.iter().map(SeedPair::key).collect();
        assert!(keys.contains(&("gasoline".into(), "petroleum".into())), "{keys:?}");
        assert!(result.iterations >= 2);
        assert!(!result.templates.is_empty());
        for t in &result.templates {
            assert!(distinct_documents(&t.template, &result.occurrences) >= 2);
            assert_eq!(t.conf, bootstrap_conf(t.hits, t.misses, t.finds));
        }
        let base = result
            .templates
            .iter()
            .find(|t| t.template.to_string() == "S is made from O")
            .expect("base template");
        // m1, m2, m3, m5 and m6 all contain the pattern.
        assert_eq!(base.finds, 5);
        assert!(base.conf > 0.0);
        let plans = boot_plans(&store, lex, ":madeFrom", &result, 3);
        assert!(!plans.is_empty() && plans.len() <= 3);

        let quick = BootConfig {
            target: 1,
            ..BootConfig::default()
        };
        let once = bootstrap_extract(&store, lex, ":madeFrom", seeds, &quick).unwrap();
        assert_eq!(once.iterations, 1);
    }

    #[test]
    fn template_matching_uses_noun_phrases() {
        let store = wine_store();
        let t = Template {
            tokens: vec![
                TemplateToken::S,
                TemplateToken::Word("is".into()),
                TemplateToken::Word("made".into()),
                TemplateToken::Word("from".into()),
                TemplateToken::O,
            ],
            instances: Vec::new(),
            extends: None,
        };
        let finds = store
            .group_sentences(":madeFrom")
            .into_iter()
            .filter(|&id| template_matches(store.sentence(id), &t))
            .count();
        assert_eq!(finds, 5);
    }
}
