//! NL name induction: identifier shortening and alternatives, noun phrase
//! extraction and ranking, conversion to annotated names, and interest
//! scores.

mod align;
mod convert;
mod interest;
pub mod names;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CorpusError, CorpusStore, MatchMode, NpSpan, SentenceId};
use crate::ontology::{EntityId, Ontology};
use crate::realize::Lexicon;
use crate::slots::NLName;

pub use align::{align_tokens, levenshtein, normalized_distance, similarity, AlignedPair, Alignment};
pub use convert::{assign_articles, np_to_nlnames};
pub use interest::{infer_interest_scores, is_obvious, InterestAssignment};
pub use names::{alt_names, make_alt_names, shorten_tokenized_name, AltNameSet};

#[derive(Debug, Error)]
pub enum NameError {
    #[error("no head candidate in noun phrase \"{np}\"")]
    NoHead { np: String },
    #[error("invalid name: {0}")]
    Invalid(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

/// A distinct noun phrase (by lowercased surface) found near an entity.
#[derive(Debug, Clone, PartialEq)]
pub struct NpCandidate {
    pub tokens: Vec<String>,
    pub pos: Vec<String>,
    pub occurrences: Vec<(SentenceId, NpSpan)>,
    pub frequency: usize,
    /// Best similarity to any tokenized name of the entity.
    pub score: f64,
    /// Crossings of the best-scoring alignment.
    pub crossed_edges: usize,
}

impl NpCandidate {
    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

#[derive(Debug, Clone)]
pub struct NameConfig {
    pub top_k: usize,
    pub seed: u64,
}

impl Default for NameConfig {
    fn default() -> Self {
        Self { top_k: 5, seed: 0 }
    }
}

/// Best similarity of `np` over `names`, with that alignment's crossings.
/// Among equal scores the alignment with fewer crossings wins.
pub fn score_np<S: AsRef<str>>(lex: &Lexicon, names: &AltNameSet, np: &[S]) -> (f64, usize) {
    let mut best = (0.0, 0);
    let mut found = false;
    for name in names.all() {
        let a = align_tokens(lex, &name.tokens, np);
        let s = similarity(&a, np.len(), name.tokens.len());
        if !found || s > best.0 || (s == best.0 && a.crossed_edges < best.1) {
            best = (s, a.crossed_edges);
            found = true;
        }
    }
    best
}

/// All noun phrases, nested ones included, of the sentences of `group` that
/// share a word stem with one of the entity's names. Phrases scoring zero are
/// dropped.
pub fn extract_np_candidates(
    store: &CorpusStore,
    lex: &Lexicon,
    group: &str,
    names: &AltNameSet,
) -> Result<Vec<NpCandidate>, CorpusError> {
    let name_tokens: Vec<Vec<String>> = names.all().map(|n| n.tokens.clone()).collect();
    let sentences = store.candidate_sentences(&name_tokens, group, MatchMode::AnyNameWord)?;
    let mut by_key: BTreeMap<String, NpCandidate> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for sid in sentences {
        let sent = store.sentence(sid);
        for span in &sent.np_spans {
            if span.is_empty() {
                continue;
            }
            let tokens = sent.surfaces(span.start..span.end);
            let key = tokens.join(" ").to_lowercase();
            let entry = by_key.entry(key.clone()).or_insert_with(|| {
                order.push(key);
                NpCandidate {
                    pos: sent.tokens[span.start..span.end]
                        .iter()
                        .map(|t| t.pos.clone())
                        .collect(),
                    tokens,
                    occurrences: Vec::new(),
                    frequency: 0,
                    score: 0.0,
                    crossed_edges: 0,
                }
            });
            entry.occurrences.push((sid, *span));
            entry.frequency += 1;
        }
    }
    let mut out = Vec::new();
    for key in order {
        let mut c = by_key.remove(&key).expect("key recorded on insert");
        let (score, crossed) = score_np(lex, names, &c.tokens);
        if score > 0.0 {
            c.score = score;
            c.crossed_edges = crossed;
            out.push(c);
        }
    }
    Ok(out)
}

/// Orders by score (desc), crossed edges (asc), frequency (desc), then a
/// seeded random key drawn in lexicographic order of the phrases.
pub fn rank_nps(mut candidates: Vec<NpCandidate>, seed: u64) -> Vec<NpCandidate> {
    candidates.sort_by_key(|c| c.text().to_lowercase());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keyed: Vec<(u64, NpCandidate)> = candidates.into_iter().map(|c| (rng.gen(), c)).collect();
    keyed.sort_by(|(ka, a), (kb, b)| {
        b.score
            .total_cmp(&a.score)
            .then(a.crossed_edges.cmp(&b.crossed_edges))
            .then(b.frequency.cmp(&a.frequency))
            .then(ka.cmp(kb))
    });
    keyed.into_iter().map(|(_, c)| c).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NameCandidate {
    pub name: NLName,
    /// Surface of the noun phrase the name came from.
    pub phrase: String,
    pub score: f64,
    pub crossed_edges: usize,
    pub frequency: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityNames {
    pub entity: String,
    pub alt_names: AltNameSet,
    pub candidates: Vec<NameCandidate>,
}

/// Ranked NL name candidates for one entity, at most `top_k` of them. The
/// corpus group of an entity is its raw identifier. Anonymous entities get
/// no candidates.
pub fn extract_names(
    ontology: &Ontology,
    store: &CorpusStore,
    lex: &Lexicon,
    t: EntityId,
    config: &NameConfig,
) -> Result<EntityNames, NameError> {
    let entity = ontology.entity(t);
    let group = entity.id.raw.clone();
    let alt = alt_names(ontology, t);
    let mut candidates: Vec<NameCandidate> = Vec::new();
    if !alt.anonymous && store.has_group(&group) {
        let nps = rank_nps(extract_np_candidates(store, lex, &group, &alt)?, config.seed);
        'outer: for np in nps {
            let names = match np_to_nlnames(store, lex, &group, entity.kind, &np) {
                Ok(n) => n,
                Err(NameError::NoHead { np }) => {
                    log::debug!("skipping headless phrase \"{np}\" for {group}");
                    continue;
                }
                Err(e) => return Err(e),
            };
            for name in names {
                let name = assign_articles(lex, &name, entity.kind);
                if candidates.iter().any(|c| c.name == name) {
                    continue;
                }
                candidates.push(NameCandidate {
                    name,
                    phrase: np.text(),
                    score: np.score,
                    crossed_edges: np.crossed_edges,
                    frequency: np.frequency,
                });
                if candidates.len() >= config.top_k {
                    break 'outer;
                }
            }
        }
    }
    Ok(EntityNames {
        entity: group,
        alt_names: alt,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CorpusBuilder, CorpusConfig};

    fn np(text: &str, score: f64, crossed: usize, freq: usize) -> NpCandidate {
        NpCandidate {
            tokens: text.split(' ').map(str::to_string).collect(),
            pos: Vec::new(),
            occurrences: Vec::new(),
            frequency: freq,
            score,
            crossed_edges: crossed,
        }
    }

    #[test]
    fn ranking_order() {
        let ranked = rank_nps(
            vec![
                np("b", 0.5, 0, 1),
                np("a", 0.9, 0, 1),
                np("c", 0.5, 2, 9),
                np("d", 0.5, 0, 5),
            ],
            0,
        );
        let texts: Vec<String> = ranked.iter().map(NpCandidate::text).collect();
        assert_eq!(texts, ["a", "d", "b", "c"]);
    }

    #[test]
    fn random_ties_are_seeded() {
        let cands: Vec<NpCandidate> = (0..8).map(|i| np(&format!("x{i}"), 0.5, 0, 1)).collect();
        let a = rank_nps(cands.clone(), 7);
        let mut reversed = cands.clone();
        reversed.reverse();
        let b = rank_nps(reversed, 7);
        assert_eq!(a, b);
    }

    fn museum_store() -> (Ontology, CorpusStore) {
        let o = Ontology::parse(
            "class :Museum\nindividual :NationalArchNapoliMuseum\n\
             instance :NationalArchNapoliMuseum :Museum\n",
        )
        .unwrap();
        let mut b = CorpusBuilder::new(CorpusConfig::default());
        b.ingest_str(
            "group :NationalArchNapoliMuseum\n\
             doc d1 query=q1 rank=1\n\
             s :: the/DT/the Naples/NNP/Naples National/NNP/National Archaeological/NNP/Archaeological Museum/NNP/Museum \
             has/VBZ/have many/JJ/many exhibits/NNS/exhibit :: NP(0,5,1) NP(6,8,1) :: det(4,0) other(4,1) other(4,2) other(4,3) subj(5,4) obj(5,7) amod(7,6)\n\
             end\n\
             doc d2 query=q1 rank=2\n\
             s :: visit/VB/visit the/DT/the museum/NN/museum :: NP(1,3,1) :: det(2,1) obj(0,2)\n\
             s :: the/DT/the museum/NN/museum opened/VBD/open :: NP(0,2,1) :: det(1,0) subj(2,1)\n\
             end\n",
            ":NationalArchNapoliMuseum",
        )
        .unwrap();
        (o, b.freeze())
    }

    #[test]
    fn museum_candidates() {
        let (o, st) = museum_store();
        let lex = Lexicon::shared();
        let t = o.entity_id(":NationalArchNapoliMuseum").unwrap();
        let alt = alt_names(&o, t);
        let nps = extract_np_candidates(&st, lex, ":NationalArchNapoliMuseum", &alt).unwrap();
        let museum = nps.iter().find(|c| c.text() == "the museum").unwrap();
        assert_eq!(museum.frequency, 2);
        let full = nps
            .iter()
            .find(|c| c.text() == "the Naples National Archaeological Museum")
            .unwrap();
        assert!((full.score - 0.6222222222222222).abs() < 1e-9);

        let out = extract_names(&o, &st, lex, t, &NameConfig::default()).unwrap();
        assert_eq!(out.candidates[0].phrase, "the Naples National Archaeological Museum");
        for c in &out.candidates {
            c.name.validate().unwrap();
        }
    }
}
