//! Noun phrase to NL name conversion and main article assignment.

use std::collections::HashMap;

use crate::corpus::{AnnotatedSentence, CorpusStore, DepLabel, NpSpan};
use crate::ontology::EntityKind;
use crate::realize::Lexicon;
use crate::slots::{Definiteness, Gender, NLName, NameSlot, Number};
use crate::text::{is_all_caps, is_capitalized};

use super::{NameError, NpCandidate};

/// Per token of the span: governor relative to the span start (if inside)
/// and the dependency label.
type ParseKey = Vec<(Option<usize>, Option<DepLabel>)>;

fn parse_key(sent: &AnnotatedSentence, span: &NpSpan) -> ParseKey {
    (span.start..span.end)
        .map(|i| match sent.head_of(i) {
            Some(d) if span.contains(d.head) => (Some(d.head - span.start), Some(d.label)),
            Some(d) => (None, Some(d.label)),
            None => (None, None),
        })
        .collect()
}

fn is_noun(pos: &str) -> bool {
    pos.starts_with("NN")
}

fn is_adjective(pos: &str) -> bool {
    pos.starts_with("JJ")
}

fn is_preposition(pos: &str) -> bool {
    pos == "IN" || pos == "TO"
}

/// Lemma and capitalization flag for a word, following the majority surface
/// form of the word in the entity's texts.
fn cased_lemma(majority: &str, lemma: &str) -> (String, bool) {
    if majority.chars().count() > 1 && is_all_caps(majority) {
        (lemma.to_uppercase(), false)
    } else if is_capitalized(majority) && majority.chars().skip(1).all(|c| !c.is_uppercase()) {
        (lemma.to_lowercase(), true)
    } else if majority.chars().all(|c| !c.is_uppercase()) {
        (lemma.to_lowercase(), false)
    } else if majority.to_lowercase() == lemma.to_lowercase() {
        (majority.to_string(), false)
    } else {
        (lemma.to_string(), false)
    }
}

/// Picks the head among in-span roots that are nouns or adjectives: the
/// rightmost one before the first preposition, else the first.
fn choose_head(sent: &AnnotatedSentence, span: &NpSpan) -> Option<usize> {
    let roots: Vec<usize> = sent
        .span_roots(span)
        .into_iter()
        .filter(|&i| {
            let pos = &sent.tokens[i].pos;
            is_noun(pos) || is_adjective(pos)
        })
        .collect();
    let first_prep = (span.start..span.end).find(|&i| is_preposition(&sent.tokens[i].pos));
    let before: Vec<usize> = roots
        .iter()
        .copied()
        .filter(|&i| first_prep.is_none_or(|p| i < p))
        .collect();
    before.last().or(roots.first()).map(|&i| i - span.start)
}

fn build_name(
    store: &CorpusStore,
    lex: &Lexicon,
    group: &str,
    kind: EntityKind,
    sent: &AnnotatedSentence,
    span: &NpSpan,
) -> Result<NLName, NameError> {
    let head = choose_head(sent, span).ok_or_else(|| NameError::NoHead {
        np: sent.surfaces(span.start..span.end).join(" "),
    })?;
    let mut slots = Vec::with_capacity(span.len());
    for (k, tok) in sent.tokens[span.start..span.end].iter().enumerate() {
        let majority = store
            .majority_form(group, &tok.surface)
            .unwrap_or_else(|| tok.surface.clone());
        let lower = tok.surface.to_lowercase();
        let slot = if tok.pos == "DT" && matches!(lower.as_str(), "the" | "a" | "an") {
            let agr = sent
                .head_of(span.start + k)
                .filter(|d| d.label == DepLabel::Det && span.contains(d.head))
                .map(|d| d.head - span.start)
                .filter(|&h| is_noun(&sent.tokens[span.start + h].pos) || h == head)
                .unwrap_or(head);
            NameSlot::Article {
                definiteness: if lower == "the" {
                    Definiteness::Definite
                } else {
                    Definiteness::Indefinite
                },
                agr: Some(agr),
            }
        } else if is_noun(&tok.pos) {
            let plural = tok.pos == "NNS" || tok.pos == "NNPS";
            let number = if plural && !(k == head && kind == EntityKind::Class) {
                Number::Plural
            } else {
                Number::Singular
            };
            let base = if tok.lemma.is_empty() || tok.lemma == "_" {
                if plural {
                    lex.singular(&tok.surface)
                } else {
                    tok.surface.clone()
                }
            } else {
                tok.lemma.clone()
            };
            let (lemma, capitalized) = cased_lemma(&majority, &base);
            NameSlot::Noun {
                gender: lex.gender_of(&lemma),
                lemma,
                head: k == head,
                number,
                capitalized,
            }
        } else if is_adjective(&tok.pos) {
            let base = if tok.lemma.is_empty() || tok.lemma == "_" {
                tok.surface.clone()
            } else {
                tok.lemma.clone()
            };
            let (lemma, capitalized) = cased_lemma(&majority, &base);
            NameSlot::Adjective {
                lemma,
                head: k == head,
                number: Number::Singular,
                gender: Gender::Neuter,
                capitalized,
            }
        } else if is_preposition(&tok.pos) {
            NameSlot::Preposition { form: lower }
        } else {
            NameSlot::FixedString {
                text: if majority.to_lowercase() == lower {
                    majority
                } else {
                    tok.surface.clone()
                },
            }
        };
        slots.push(slot);
    }
    let name = NLName::new(slots);
    name.validate().map_err(|e| NameError::Invalid(e.to_string()))?;
    Ok(name)
}

/// One NL name per distinct POS assignment of the noun phrase, each built
/// from the most frequent parse among the occurrences with that assignment.
pub fn np_to_nlnames(
    store: &CorpusStore,
    lex: &Lexicon,
    group: &str,
    kind: EntityKind,
    np: &NpCandidate,
) -> Result<Vec<NLName>, NameError> {
    let mut assignments: Vec<Vec<String>> = Vec::new();
    let mut parses: HashMap<Vec<String>, Vec<(ParseKey, usize, usize)>> = HashMap::new();
    for (idx, (sid, span)) in np.occurrences.iter().enumerate() {
        let sent = store.sentence(*sid);
        let pos: Vec<String> = sent.tokens[span.start..span.end]
            .iter()
            .map(|t| t.pos.clone())
            .collect();
        if !assignments.contains(&pos) {
            assignments.push(pos.clone());
        }
        let key = parse_key(sent, span);
        let entry = parses.entry(pos).or_default();
        match entry.iter_mut().find(|(k, _, _)| *k == key) {
            Some(e) => e.1 += 1,
            None => entry.push((key, 1, idx)),
        }
    }
    let mut names = Vec::new();
    for pos in assignments {
        let options = &parses[&pos];
        let best = options
            .iter()
            .max_by(|a, b| a.1.cmp(&b.1).then(b.2.cmp(&a.2)))
            .expect("every assignment has a parse");
        let (sid, span) = &np.occurrences[best.2];
        let name = build_name(store, lex, group, kind, store.sentence(*sid), span)?;
        if !names.contains(&name) {
            names.push(name);
        }
    }
    Ok(names)
}

fn remove_slot(name: &mut NLName, index: usize) {
    name.slots.remove(index);
    for slot in &mut name.slots {
        if let NameSlot::Article { agr: Some(a), .. } = slot {
            if *a > index {
                *a -= 1;
            }
        }
    }
}

fn is_proper_name(name: &NLName) -> bool {
    let mut content = name.slots.iter().filter(|s| !s.is_article()).peekable();
    content.peek().is_some()
        && content.all(|s| match s {
            NameSlot::Noun {
                lemma, capitalized, ..
            } => *capitalized || is_capitalized(lemma),
            _ => false,
        })
}

/// Sets the main article for a class (indefinite) or individual (definite)
/// after stripping leading non-article determiners. The article is dropped
/// for adjective or plural heads, proper names and bare mass nouns.
pub fn assign_articles(lex: &Lexicon, name: &NLName, kind: EntityKind) -> NLName {
    let mut name = name.clone();
    while let Some(NameSlot::FixedString { text }) = name.slots.first() {
        if !lex.is_determiner(text) {
            break;
        }
        remove_slot(&mut name, 0);
    }
    let Some(head) = name.head_index() else {
        return name;
    };
    let main = name
        .slots
        .iter()
        .position(|s| matches!(s, NameSlot::Article { agr, .. } if *agr == Some(head)))
        .or_else(|| name.slots.iter().position(NameSlot::is_article));
    let omit = match &name.slots[head] {
        NameSlot::Adjective { .. } => true,
        NameSlot::Noun { number, lemma, .. } => {
            *number == Number::Plural
                || is_proper_name(&name)
                || (main.is_none() && lex.is_mass_noun(lemma))
        }
        _ => false,
    };
    let definiteness = match kind {
        EntityKind::Class => Definiteness::Indefinite,
        EntityKind::Individual => Definiteness::Definite,
    };
    match (main, omit) {
        (Some(i), true) => remove_slot(&mut name, i),
        (None, true) => {}
        (Some(i), false) => {
            name.slots[i] = NameSlot::Article {
                definiteness,
                agr: Some(head),
            }
        }
        (None, false) => {
            for slot in &mut name.slots {
                if let NameSlot::Article { agr: Some(a), .. } = slot {
                    *a += 1;
                }
            }
            name.slots.insert(
                0,
                NameSlot::Article {
                    definiteness,
                    agr: Some(head + 1),
                },
            );
        }
    }
    name
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CorpusBuilder, CorpusConfig, SentenceId};

    fn store() -> CorpusStore {
        let mut b = CorpusBuilder::new(CorpusConfig::default());
        b.ingest_str(
            "group :RedWine\n\
             doc d1 query=q1 rank=1\n\
             s :: the/DT/the Red/JJ/red Wines/NNS/wine are/VBP/be nice/JJ/nice :: NP(0,3,1) :: det(2,0) amod(2,1)\n\
             s :: red/JJ/red wine/NN/wine is/VBZ/be strong/JJ/strong :: NP(0,2,1) NP(3,4,1) :: amod(1,0)\n\
             s :: red/JJ/red grapes/NNS/grape :: NP(0,2,1) :: amod(1,0)\n\
             s :: I/PRP/I like/VBP/like red/JJ/red wines/NNS/wine :: NP(2,4,1) :: amod(3,2) obj(1,3)\n\
             end\n",
            ":RedWine",
        )
        .unwrap();
        b.freeze()
    }

    fn candidate(store: &CorpusStore, sent: usize, span: NpSpan) -> NpCandidate {
        let sid = SentenceId { doc: 0, sent };
        let s = store.sentence(sid);
        NpCandidate {
            tokens: s.surfaces(span.start..span.end),
            pos: s.tokens[span.start..span.end].iter().map(|t| t.pos.clone()).collect(),
            occurrences: vec![(sid, span)],
            frequency: 1,
            score: 1.0,
            crossed_edges: 0,
        }
    }

    #[test]
    fn red_wines_to_name() {
        let st = store();
        let lex = Lexicon::shared();
        let np = candidate(&st, 0, NpSpan { start: 0, end: 3, base: true });
        let names = np_to_nlnames(&st, lex, ":RedWine", EntityKind::Class, &np).unwrap();
        assert_eq!(names.len(), 1);
        assert_eq!(
            names[0].to_string(),
            "[]{article,def,agr=3} [red]{adj} [wine]{noun,head,sing,neut}"
        );
        let final_name = assign_articles(lex, &names[0], EntityKind::Class);
        assert_eq!(
            final_name.to_string(),
            "[]{article,indef,agr=3} [red]{adj} [wine]{noun,head,sing,neut}"
        );
    }

    #[test]
    fn adjective_head_has_no_article() {
        let st = store();
        let lex = Lexicon::shared();
        let np = candidate(&st, 1, NpSpan { start: 3, end: 4, base: true });
        let names = np_to_nlnames(&st, lex, ":RedWine", EntityKind::Class, &np).unwrap();
        let name = assign_articles(lex, &names[0], EntityKind::Class);
        assert_eq!(name.slots.len(), 1);
        assert!(matches!(&name.slots[0], NameSlot::Adjective { head: true, .. }));
    }

    #[test]
    fn plural_individual_keeps_plural_without_article() {
        let st = store();
        let lex = Lexicon::shared();
        let np = candidate(&st, 2, NpSpan { start: 0, end: 2, base: true });
        let names = np_to_nlnames(&st, lex, ":RedWine", EntityKind::Individual, &np).unwrap();
        let name = assign_articles(lex, &names[0], EntityKind::Individual);
        assert!(!name.slots.iter().any(NameSlot::is_article));
        assert!(matches!(&name.slots[1], NameSlot::Noun { number: Number::Plural, .. }));
    }

    #[test]
    fn majority_capitalization() {
        assert_eq!(cased_lemma("Red", "red"), ("red".into(), true));
        assert_eq!(cased_lemma("red", "red"), ("red".into(), false));
        assert_eq!(cased_lemma("RED", "red"), ("RED".into(), false));
    }

    #[test]
    fn proper_name_and_individual_article() {
        let lex = Lexicon::shared();
        let noun = |lemma: &str, head: bool, cap: bool| NameSlot::Noun {
            lemma: lemma.into(),
            head,
            number: Number::Singular,
            gender: Gender::Neuter,
            capitalized: cap,
        };
        let proper = NLName::new(vec![noun("south", false, true), noun("australia", true, true)]);
        assert_eq!(assign_articles(lex, &proper, EntityKind::Individual), proper);

        let region = NLName::new(vec![
            noun("south", false, true),
            noun("australia", false, true),
            noun("region", true, false),
        ]);
        let out = assign_articles(lex, &region, EntityKind::Individual);
        assert_eq!(
            out.slots[0],
            NameSlot::Article {
                definiteness: Definiteness::Definite,
                agr: Some(3)
            }
        );

        let gold = NLName::new(vec![noun("gold", true, false)]);
        assert_eq!(assign_articles(lex, &gold, EntityKind::Class), gold);

        let this = NLName::new(vec![NameSlot::FixedString { text: "this".into() }, noun("statue", true, false)]);
        let out = assign_articles(lex, &this, EntityKind::Individual);
        assert_eq!(out.slots.len(), 2);
        assert!(out.slots[0].is_article());
    }
}
