//! Shortened and alternative tokenized identifiers of an entity.

use serde::{Deserialize, Serialize};

use crate::ontology::{EntityId, MessageTriple, NameSource, Ontology, TokenizedName};
use crate::text::is_numeric;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AltNameSet {
    pub primary: TokenizedName,
    pub alternatives: Vec<TokenizedName>,
    pub anonymous: bool,
}

impl AltNameSet {
    /// The primary name followed by every alternative.
    pub fn all(&self) -> impl Iterator<Item = &TokenizedName> {
        std::iter::once(&self.primary).chain(self.alternatives.iter())
    }

    fn push(&mut self, name: TokenizedName) {
        if name.tokens.is_empty() {
            return;
        }
        let key = name.key();
        if self.all().any(|n| n.key() == key) {
            return;
        }
        self.alternatives.push(name);
    }
}

fn lower(tokens: &[String]) -> Vec<String> {
    tokens.iter().map(|t| t.to_lowercase()).collect()
}

/// Start of the first contiguous case-insensitive occurrence of `needle`.
fn find_sequence(haystack: &[String], needle: &[String]) -> Option<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return None;
    }
    let hay = lower(haystack);
    let nee = lower(needle);
    (0..=hay.len() - nee.len()).find(|&i| hay[i..i + nee.len()] == nee[..])
}

/// Removes from the tokenized identifier of `t` every token sequence equal to
/// the tokenized identifier of an object of `triples`. Longer object names are
/// tried first and the scan restarts after each removal. The entity is
/// anonymous when nothing but numbers remains.
pub fn shorten_tokenized_name(ontology: &Ontology, t: EntityId, triples: &[MessageTriple]) -> AltNameSet {
    let primary = ontology.tok_name(t);
    let mut objects: Vec<Vec<String>> = triples
        .iter()
        .filter(|tr| tr.s == t && tr.o != t)
        .map(|tr| ontology.tok_name(tr.o).tokens)
        .filter(|toks| !toks.is_empty())
        .collect();
    objects.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| lower(a).cmp(&lower(b))));
    objects.dedup_by(|a, b| lower(a) == lower(b));

    let mut remaining = primary.tokens.clone();
    'scan: loop {
        for obj in &objects {
            if let Some(start) = find_sequence(&remaining, obj) {
                remaining.drain(start..start + obj.len());
                continue 'scan;
            }
        }
        break;
    }
    let anonymous = remaining.iter().all(|t| is_numeric(t));
    let mut set = AltNameSet {
        primary,
        alternatives: Vec::new(),
        anonymous,
    };
    if !anonymous && remaining.len() < set.primary.tokens.len() {
        set.push(TokenizedName::new(remaining, NameSource::Shortened));
    }
    set
}

/// Adds ancestor-appended, number-stripped and bracket-part alternatives.
/// Ancestor names are appended, lowercased, only when the identifier contains
/// none of them.
pub fn make_alt_names(ontology: &Ontology, t: EntityId, mut set: AltNameSet) -> AltNameSet {
    let primary = set.primary.tokens.clone();
    let mut ancestor_names: Vec<Vec<String>> = Vec::new();
    for a in ontology.ancestors_of(t) {
        let toks = ontology.tok_name(a).tokens;
        if !toks.is_empty() && !ancestor_names.iter().any(|n| lower(n) == lower(&toks)) {
            ancestor_names.push(toks);
        }
    }
    let contains_ancestor = ancestor_names
        .iter()
        .any(|n| find_sequence(&primary, n).is_some());
    if !contains_ancestor {
        for n in &ancestor_names {
            let mut toks = primary.clone();
            toks.extend(n.iter().map(|t| t.to_lowercase()));
            set.push(TokenizedName::new(toks, NameSource::AncestorAppended));
        }
    }

    let stripped: Vec<String> = primary.iter().filter(|t| !is_numeric(t)).cloned().collect();
    if stripped.len() < primary.len() {
        set.push(TokenizedName::new(stripped, NameSource::NumberStripped));
    }

    if primary.iter().any(|t| t == "(") {
        let mut outside = Vec::new();
        let mut inside: Vec<Vec<String>> = Vec::new();
        let mut depth = 0usize;
        for tok in &primary {
            match tok.as_str() {
                "(" => {
                    depth += 1;
                    if depth == 1 {
                        inside.push(Vec::new());
                    }
                }
                ")" => depth = depth.saturating_sub(1),
                _ if depth == 0 => outside.push(tok.clone()),
                _ => {
                    if let Some(last) = inside.last_mut() {
                        last.push(tok.clone());
                    }
                }
            }
        }
        set.push(TokenizedName::new(outside, NameSource::BracketPart));
        for part in inside {
            set.push(TokenizedName::new(part, NameSource::BracketPart));
        }
    }
    set
}

/// Shortening followed, for named entities, by the alternative names.
pub fn alt_names(ontology: &Ontology, t: EntityId) -> AltNameSet {
    let set = shorten_tokenized_name(ontology, t, &ontology.triples_about(t));
    if set.anonymous {
        set
    } else {
        make_alt_names(ontology, t, set)
    }
}
