//! Zero interest scores for triples made obvious by the names involved.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::CorpusStore;
use crate::ontology::{EntityId, MessageTriple};
use crate::realize::{realize_nlname_tokens, Lexicon, NameOptions};
use crate::slots::NLName;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterestAssignment {
    pub triple: MessageTriple,
    /// `true` when the triple should not be expressed.
    pub zero: bool,
}

fn lemma_words(store: Option<&CorpusStore>, lex: &Lexicon, name: &NLName) -> BTreeSet<String> {
    realize_nlname_tokens(lex, name, &NameOptions::default())
        .into_iter()
        .filter(|w| !matches!(w.to_lowercase().as_str(), "a" | "an" | "the"))
        .map(|w| {
            store
                .and_then(|s| s.lemma_of(&w))
                .unwrap_or_else(|| lex.singular(&w))
                .to_lowercase()
        })
        .collect()
}

/// Lemmatized non-article words of O's phrase all occurring in S's phrase.
pub fn is_obvious(store: Option<&CorpusStore>, lex: &Lexicon, s: &NLName, o: &NLName) -> bool {
    let o_words = lemma_words(store, lex, o);
    !o_words.is_empty() && o_words.is_subset(&lemma_words(store, lex, s))
}

/// One assignment per triple whose subject and object both have a name.
pub fn infer_interest_scores(
    store: Option<&CorpusStore>,
    lex: &Lexicon,
    names: &BTreeMap<EntityId, NLName>,
    triples: &[MessageTriple],
) -> Vec<InterestAssignment> {
    triples
        .iter()
        .filter_map(|t| {
            let s = names.get(&t.s)?;
            let o = names.get(&t.o)?;
            Some(InterestAssignment {
                triple: *t,
                zero: is_obvious(store, lex, s, o),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::TripleRelation;

    fn name(text: &str) -> NLName {
        text.parse().unwrap()
    }

    #[test]
    fn subsumed_object_name() {
        let lex = Lexicon::shared();
        let white = name("[]{article,indef,agr=3} [white]{adj} [bordeaux]{noun,head,sing,neut,cap}");
        let bordeaux = name("[]{article,indef,agr=2} [bordeaux]{noun,head,sing,neut,cap}");
        let kalin = name("[kalin]{noun,sing,neut,cap} [cellars]{noun,head,sing,neut,cap}");
        let mut names = BTreeMap::new();
        names.insert(EntityId(0), white);
        names.insert(EntityId(1), bordeaux);
        names.insert(EntityId(2), kalin);
        let triples = [
            MessageTriple {
                s: EntityId(0),
                r: TripleRelation::IsA,
                o: EntityId(1),
            },
            MessageTriple {
                s: EntityId(0),
                r: TripleRelation::IsA,
                o: EntityId(2),
            },
        ];
        let out = infer_interest_scores(None, lex, &names, &triples);
        assert!(out[0].zero);
        assert!(!out[1].zero);
    }

    #[test]
    fn ignores_articles_and_order() {
        let lex = Lexicon::shared();
        let s = name("[]{article,indef,agr=3} [red]{adj} [wine]{noun,head,sing,neut}");
        let o = name("[]{article,def,agr=3} [red]{adj} [wine]{noun,head,plur,neut}");
        assert!(is_obvious(None, lex, &s, &o));
    }
}
