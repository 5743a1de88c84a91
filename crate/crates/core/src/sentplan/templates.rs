//! Noun phrase anchor pairs and slotted string templates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::corpus::{CorpusError, CorpusStore, MatchMode, NpSpan, SentenceId};
use crate::text::{tfidf_vector, IdfSource};

use super::seeds::SeedPair;

/// One seed pair matching an anchor occurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedMatch {
    pub seed: usize,
    pub cos1: f64,
    pub cos2: f64,
}

/// Two noun phrases of one sentence: `s_span` matched the first seed name,
/// `o_span` the second.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorOccurrence {
    pub sentence: SentenceId,
    pub s_span: NpSpan,
    pub o_span: NpSpan,
    pub matches: Vec<SeedMatch>,
}

impl AnchorOccurrence {
    /// Lowercased surfaces of the two anchors.
    pub fn anchor_texts(&self, store: &CorpusStore) -> (String, String) {
        let sent = store.sentence(self.sentence);
        (
            sent.surfaces(self.s_span.start..self.s_span.end).join(" ").to_lowercase(),
            sent.surfaces(self.o_span.start..self.o_span.end).join(" ").to_lowercase(),
        )
    }

    fn bounds(&self) -> (usize, usize) {
        (
            self.s_span.start.min(self.o_span.start),
            self.s_span.end.max(self.o_span.end),
        )
    }
}

/// Finds the anchor occurrences of `seeds` in the sentences of `group`. For
/// each seed pair only sentences sharing a stem with both seed names are
/// examined; two disjoint base noun phrases match when, in one of the two
/// assignments, each phrase has cosine above `threshold` with its seed name.
/// If both assignments pass the one with the larger cosine sum wins.
pub fn match_anchor_pairs(
    store: &CorpusStore,
    group: &str,
    seeds: &[SeedPair],
    threshold: f64,
) -> Result<Vec<AnchorOccurrence>, CorpusError> {
    let idf = store.idf(group);
    let idf: &dyn IdfSource = &idf;
    let mut found: BTreeMap<(SentenceId, NpSpan, NpSpan), Vec<SeedMatch>> = BTreeMap::new();
    for (i, seed) in seeds.iter().enumerate() {
        let v1 = tfidf_vector(&seed.n1, idf);
        let v2 = tfidf_vector(&seed.n2, idf);
        if v1.is_zero() || v2.is_zero() {
            continue;
        }
        let names = [seed.n1.clone(), seed.n2.clone()];
        for sid in store.candidate_sentences(&names, group, MatchMode::EachName)? {
            let sent = store.sentence(sid);
            let bases: Vec<&NpSpan> = sent.np_spans.iter().filter(|s| s.base && !s.is_empty()).collect();
            let vectors: Vec<_> = bases
                .iter()
                .map(|s| tfidf_vector(&sent.surfaces(s.start..s.end), idf))
                .collect();
            for x in 0..bases.len() {
                for y in x + 1..bases.len() {
                    if bases[x].overlaps(bases[y]) {
                        continue;
                    }
                    let forward = (vectors[x].cosine(&v1), vectors[y].cosine(&v2));
                    let backward = (vectors[y].cosine(&v1), vectors[x].cosine(&v2));
                    let pass = |c: (f64, f64)| c.0 > threshold && c.1 > threshold;
                    let choice = match (pass(forward), pass(backward)) {
                        (true, true) if backward.0 + backward.1 > forward.0 + forward.1 => Some((y, x, backward)),
                        (true, _) => Some((x, y, forward)),
                        (false, true) => Some((y, x, backward)),
                        (false, false) => None,
                    };
                    if let Some((s, o, (cos1, cos2))) = choice {
                        found
                            .entry((sid, *bases[s], *bases[o]))
                            .or_default()
                            .push(SeedMatch { seed: i, cos1, cos2 });
                    }
                }
            }
        }
    }
    Ok(found
        .into_iter()
        .map(|((sentence, s_span, o_span), matches)| AnchorOccurrence {
            sentence,
            s_span,
            o_span,
            matches,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TemplateToken {
    S,
    O,
    Word(String),
}

/// Where a template was read off: an anchor occurrence and how many words
/// beyond the anchors it takes on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TemplateInstance {
    pub occurrence: usize,
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub tokens: Vec<TemplateToken>,
    pub instances: Vec<TemplateInstance>,
    /// Index of the template this one extends.
    pub extends: Option<usize>,
}

impl Template {
    /// Case-insensitive identity.
    pub fn key(&self) -> Vec<TemplateToken> {
        self.tokens
            .iter()
            .map(|t| match t {
                TemplateToken::Word(w) => TemplateToken::Word(w.to_lowercase()),
                other => other.clone(),
            })
            .collect()
    }

    /// The words without the placeholders.
    pub fn words(&self) -> Vec<String> {
        self.tokens
            .iter()
            .filter_map(|t| match t {
                TemplateToken::Word(w) => Some(w.clone()),
                _ => None,
            })
            .collect()
    }

    /// Words strictly between the two placeholders.
    pub fn interior(&self) -> Vec<String> {
        let first = self.tokens.iter().position(|t| !matches!(t, TemplateToken::Word(_)));
        let last = self.tokens.iter().rposition(|t| !matches!(t, TemplateToken::Word(_)));
        match (first, last) {
            (Some(a), Some(b)) if a < b => self.tokens[a + 1..b]
                .iter()
                .filter_map(|t| match t {
                    TemplateToken::Word(w) => Some(w.clone()),
                    _ => None,
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn distinct_sentences(&self, occurrences: &[AnchorOccurrence]) -> usize {
        self.instances
            .iter()
            .map(|i| occurrences[i.occurrence].sentence)
            .collect::<BTreeSet<_>>()
            .len()
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<&str> = self
            .tokens
            .iter()
            .map(|t| match t {
                TemplateToken::S => "S",
                TemplateToken::O => "O",
                TemplateToken::Word(w) => w.as_str(),
            })
            .collect();
        f.write_str(&words.join(" "))
    }
}

/// Template tokens of an occurrence widened by `left`/`right` words.
pub fn template_tokens(store: &CorpusStore, occ: &AnchorOccurrence, left: usize, right: usize) -> Vec<TemplateToken> {
    let sent = store.sentence(occ.sentence);
    let (lo, hi) = occ.bounds();
    let mut out = Vec::new();
    let word = |i: usize| TemplateToken::Word(sent.tokens[i].surface.clone());
    out.extend((lo - left..lo).map(word));
    let (first, second, first_tok, second_tok) = if occ.s_span.start < occ.o_span.start {
        (occ.s_span, occ.o_span, TemplateToken::S, TemplateToken::O)
    } else {
        (occ.o_span, occ.s_span, TemplateToken::O, TemplateToken::S)
    };
    out.push(first_tok);
    out.extend((first.end..second.start).map(word));
    out.push(second_tok);
    out.extend((hi..hi + right).map(word));
    out
}

fn collect(store: &CorpusStore, occurrences: &[AnchorOccurrence], instances: &[TemplateInstance], extends: Option<usize>) -> Vec<Template> {
    let mut by_key: BTreeMap<Vec<TemplateToken>, usize> = BTreeMap::new();
    let mut out: Vec<Template> = Vec::new();
    for inst in instances {
        let tokens = template_tokens(store, &occurrences[inst.occurrence], inst.left, inst.right);
        let t = Template {
            tokens,
            instances: Vec::new(),
            extends,
        };
        let idx = *by_key.entry(t.key()).or_insert_with(|| {
            out.push(t);
            out.len() - 1
        });
        if !out[idx].instances.contains(inst) {
            out[idx].instances.push(*inst);
        }
    }
    out
}

/// Base templates (interior words only) from at least `min_sentences`
/// distinct sentences, in order of first appearance.
pub fn extract_templates(store: &CorpusStore, occurrences: &[AnchorOccurrence], min_sentences: usize) -> Vec<Template> {
    let instances: Vec<TemplateInstance> = (0..occurrences.len())
        .map(|occurrence| TemplateInstance {
            occurrence,
            left: 0,
            right: 0,
        })
        .collect();
    collect(store, occurrences, &instances, None)
        .into_iter()
        .filter(|t| t.distinct_sentences(occurrences) >= min_sentences)
        .collect()
}

/// Every widening of each base template towards the sentence boundaries that
/// occurs in at least `min_sentences` distinct sentences. `first_index` is
/// the index the first base template will have in the combined list.
pub fn extend_templates(
    store: &CorpusStore,
    occurrences: &[AnchorOccurrence],
    bases: &[Template],
    first_index: usize,
    min_sentences: usize,
) -> Vec<Template> {
    let mut out = Vec::new();
    for (b, base) in bases.iter().enumerate() {
        let mut instances = Vec::new();
        for inst in &base.instances {
            let occ = &occurrences[inst.occurrence];
            let (lo, hi) = occ.bounds();
            let len = store.sentence(occ.sentence).tokens.len();
            for left in 0..=lo {
                for right in 0..=len - hi {
                    if left + right > 0 {
                        instances.push(TemplateInstance {
                            occurrence: inst.occurrence,
                            left,
                            right,
                        });
                    }
                }
            }
        }
        out.extend(
            collect(store, occurrences, &instances, Some(first_index + b))
                .into_iter()
                .filter(|t| t.distinct_sentences(occurrences) >= min_sentences),
        );
    }
    out
}
