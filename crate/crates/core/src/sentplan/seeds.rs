//! Seed name pairs of a relation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ontology::{EntityId, MessageTriple, Ontology, RelationId};
use crate::realize::{realize_nlname_tokens, ArticleChoice, Lexicon, NameOptions};
use crate::slots::NLName;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedPair {
    pub n1: Vec<String>,
    pub n2: Vec<String>,
    pub n1_secondary: bool,
    pub n2_secondary: bool,
}

impl SeedPair {
    pub fn new(n1: Vec<String>, n2: Vec<String>) -> Self {
        Self {
            n1,
            n2,
            n1_secondary: false,
            n2_secondary: false,
        }
    }

    /// 1, ½ or ¼ depending on how many sides are secondary.
    pub fn weight(&self) -> f64 {
        match (self.n1_secondary, self.n2_secondary) {
            (false, false) => 1.0,
            (true, true) => 0.25,
            _ => 0.5,
        }
    }

    pub fn key(&self) -> (String, String) {
        (self.n1.join(" ").to_lowercase(), self.n2.join(" ").to_lowercase())
    }
}

/// Words a name produces without its article.
pub fn seed_name(lex: &Lexicon, name: &NLName) -> Vec<String> {
    let options = NameOptions {
        article: ArticleChoice::Omit,
        ..NameOptions::default()
    };
    realize_nlname_tokens(lex, name, &options)
}

fn generalizations(ontology: &Ontology, e: EntityId) -> Vec<EntityId> {
    let entity = ontology.entity(e);
    let mut out: Vec<EntityId> = Vec::new();
    for &g in entity.parents.iter().chain(entity.equivalents.iter()) {
        if g != e && !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// Pairs for the facts of `r` and for the variants obtained by replacing the
/// subject, the object or both with a class, parent class or equivalent class.
/// Entities without a name are skipped. Duplicate phrase pairs keep the
/// largest weight at the position of their first appearance.
pub fn build_seed_pairs(
    ontology: &Ontology,
    lex: &Lexicon,
    r: RelationId,
    names: &BTreeMap<EntityId, NLName>,
) -> Vec<SeedPair> {
    let facts: Vec<MessageTriple> = ontology.facts_of(r).copied().collect();
    let phrase = |e: EntityId| names.get(&e).map(|n| seed_name(lex, n));
    let mut out: Vec<SeedPair> = Vec::new();
    let mut push = |pair: SeedPair| {
        if pair.n1.is_empty() || pair.n2.is_empty() {
            return;
        }
        let key = pair.key();
        match out.iter_mut().find(|p| p.key() == key) {
            Some(existing) if existing.weight() < pair.weight() => *existing = pair,
            Some(_) => {}
            None => out.push(pair),
        }
    };
    for t in &facts {
        let mut subjects = vec![(t.s, false)];
        subjects.extend(generalizations(ontology, t.s).into_iter().map(|g| (g, true)));
        let mut objects = vec![(t.o, false)];
        objects.extend(generalizations(ontology, t.o).into_iter().map(|g| (g, true)));
        for &(s, s_sec) in &subjects {
            for &(o, o_sec) in &objects {
                let (Some(n1), Some(n2)) = (phrase(s), phrase(o)) else {
                    continue;
                };
                push(SeedPair {
                    n1,
                    n2,
                    n1_secondary: s_sec,
                    n2_secondary: o_sec,
                });
            }
        }
    }
    out
}
