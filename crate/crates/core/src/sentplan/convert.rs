//! Template to sentence plan conversion and verb repairs.

use crate::corpus::{AnnotatedSentence, CorpusStore, DepLabel, NpSpan};
use crate::realize::Lexicon;
use crate::slots::{Case, Number, PlanSlot, Polarity, Role, SentencePlan, Tense, VerbForm, Voice};
use crate::text::{is_all_caps, is_capitalized};

use super::templates::{AnchorOccurrence, Template, TemplateInstance, TemplateToken};
use super::PlanError;

/// Sentence position behind each template token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pos {
    Word(usize),
    Anchor(Role, NpSpan),
}

fn positions(occ: &AnchorOccurrence, template: &Template, inst: &TemplateInstance) -> Vec<Pos> {
    let lo = occ.s_span.start.min(occ.o_span.start);
    let mut next = lo - inst.left;
    let mut out = Vec::with_capacity(template.tokens.len());
    for tok in &template.tokens {
        match tok {
            TemplateToken::S => {
                out.push(Pos::Anchor(Role::S, occ.s_span));
                next = occ.s_span.end;
            }
            TemplateToken::O => {
                out.push(Pos::Anchor(Role::O, occ.o_span));
                next = occ.o_span.end;
            }
            TemplateToken::Word(_) => {
                out.push(Pos::Word(next));
                next += 1;
            }
        }
    }
    out
}

fn pos_sequence(sent: &AnnotatedSentence, positions: &[Pos]) -> Vec<String> {
    positions
        .iter()
        .filter_map(|p| match p {
            Pos::Word(i) => Some(sent.tokens[*i].pos.clone()),
            Pos::Anchor(..) => None,
        })
        .collect()
}

/// Template position holding sentence index `i`.
fn position_of(positions: &[Pos], i: usize) -> Option<usize> {
    positions.iter().position(|p| match p {
        Pos::Word(w) => *w == i,
        Pos::Anchor(_, span) => span.contains(i),
    })
}

/// Dependencies restricted to the template, expressed in template positions.
fn parse_key(sent: &AnnotatedSentence, positions: &[Pos]) -> Vec<(usize, usize, DepLabel)> {
    let mut key: Vec<(usize, usize, DepLabel)> = sent
        .dependencies
        .iter()
        .filter_map(|d| {
            let h = position_of(positions, d.head)?;
            let dep = position_of(positions, d.dependent)?;
            (h != dep).then_some((h, dep, d.label))
        })
        .collect();
    key.sort();
    key.dedup();
    key
}

fn is_verb(pos: &str) -> bool {
    pos.starts_with("VB") || pos == "MD"
}

fn is_noun(pos: &str) -> bool {
    pos.starts_with("NN")
}

fn base_form(lemma: &str, surface: &str) -> String {
    if lemma.is_empty() || lemma == "_" {
        surface.to_lowercase()
    } else {
        lemma.to_string()
    }
}

/// Reads a verb group (verbs with optional negations) into a verb slot.
fn verb_slot(lex: &Lexicon, sent: &AnnotatedSentence, group: &[usize]) -> PlanSlot {
    let verbs: Vec<usize> = group
        .iter()
        .copied()
        .filter(|&i| is_verb(&sent.tokens[i].pos))
        .collect();
    let negative = group.iter().any(|&i| lex.is_negation(&sent.tokens[i].surface));
    let main = *verbs.last().expect("a verb group holds a verb");
    let main_tok = &sent.tokens[main];
    let lemma_of = |i: usize| {
        let t = &sent.tokens[i];
        if t.lemma.is_empty() || t.lemma == "_" {
            lex.verb_lemma(&t.surface.to_lowercase())
        } else {
            t.lemma.to_lowercase()
        }
    };
    let lemma = lemma_of(main);
    let aux_be = verbs[..verbs.len() - 1].iter().any(|&i| lemma_of(i) == "be");
    let tense = verbs
        .iter()
        .map(|&i| sent.tokens[i].pos.as_str())
        .find(|p| matches!(*p, "VBD" | "VBZ" | "VBP" | "MD"))
        .map_or(Tense::Present, |p| if p == "VBD" { Tense::Past } else { Tense::Present });
    let (voice, form) = match (main_tok.pos.as_str(), verbs.len()) {
        ("VBN", 1) => (Voice::Active, VerbForm::PastParticiple),
        ("VBG", 1) => (Voice::Active, VerbForm::PresentParticiple),
        ("VBN", _) if aux_be => (Voice::Passive, VerbForm::Finite),
        ("VBG", _) if aux_be => (Voice::Active, VerbForm::Progressive),
        _ => (Voice::Active, VerbForm::Finite),
    };
    PlanSlot::Verb {
        lemma,
        voice,
        tense,
        polarity: if negative {
            Polarity::Negative
        } else {
            Polarity::Positive
        },
        form,
        agr: None,
    }
}

/// Dependency label linking an anchor to a governor outside it.
fn anchor_labels(sent: &AnnotatedSentence, span: &NpSpan) -> Vec<DepLabel> {
    sent.span_roots(span)
        .into_iter()
        .filter_map(|r| sent.head_of(r).map(|d| d.label))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanDraft {
    pub plan: SentencePlan,
    /// The plan as read off the template, before verb repairs.
    pub original: SentencePlan,
    pub repaired: bool,
    /// A reference slot is the subject of a verb in the chosen parse.
    pub subject_ref: bool,
    /// A reference slot is the object of a verb in the chosen parse.
    pub object_ref: bool,
}

/// Converts a template using the most frequent POS sequence of its
/// instances and, among those, the most frequent parse.
pub fn template_to_plan(
    store: &CorpusStore,
    lex: &Lexicon,
    group: &str,
    template: &Template,
    occurrences: &[AnchorOccurrence],
) -> Result<PlanDraft, PlanError> {
    if template.instances.is_empty() {
        return Err(PlanError::NoTags(template.to_string()));
    }
    let views: Vec<(&AnnotatedSentence, Vec<Pos>)> = template
        .instances
        .iter()
        .map(|inst| {
            let occ = &occurrences[inst.occurrence];
            (store.sentence(occ.sentence), positions(occ, template, inst))
        })
        .collect();
    let tag_seqs: Vec<Vec<String>> = views.iter().map(|(s, p)| pos_sequence(s, p)).collect();
    let best_tags = most_frequent(&tag_seqs);
    let parse_keys: Vec<Option<Vec<(usize, usize, DepLabel)>>> = views
        .iter()
        .zip(&tag_seqs)
        .map(|((s, p), tags)| (*tags == tag_seqs[best_tags]).then(|| parse_key(s, p)))
        .collect();
    let chosen = most_frequent_some(&parse_keys).unwrap_or(best_tags);
    let (sent, pos) = &views[chosen];

    let mut slots: Vec<PlanSlot> = Vec::new();
    let mut subject_ref = false;
    let mut object_ref = false;
    let mut ref_cases: Vec<(usize, NpSpan)> = Vec::new();
    let mut verb_groups: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut k = 0;
    while k < pos.len() {
        match pos[k] {
            Pos::Anchor(role, span) => {
                ref_cases.push((slots.len(), span));
                slots.push(PlanSlot::reference(role, Case::Nominative));
                k += 1;
                // a possessive marker right after the anchor belongs to it
                if let Some(Pos::Word(i)) = pos.get(k) {
                    if sent.tokens[*i].pos == "POS" {
                        if let Some(PlanSlot::Ref { case, .. }) = slots.last_mut() {
                            *case = Case::Possessive;
                        }
                        k += 1;
                    }
                }
            }
            Pos::Word(i) => {
                let tok = &sent.tokens[i];
                if is_verb(&tok.pos) {
                    let mut group = vec![i];
                    let mut j = k + 1;
                    while let Some(Pos::Word(w)) = pos.get(j) {
                        let t = &sent.tokens[*w];
                        if is_verb(&t.pos) || lex.is_negation(&t.surface) {
                            group.push(*w);
                            j += 1;
                        } else {
                            break;
                        }
                    }
                    // trailing adverbs are not part of the group
                    while group.len() > 1 {
                        let last = *group.last().expect("non-empty");
                        let t = &sent.tokens[last];
                        if is_verb(&t.pos) || lex.is_negation(&t.surface) {
                            break;
                        }
                        group.pop();
                        j -= 1;
                    }
                    verb_groups.push((slots.len(), group.clone()));
                    slots.push(verb_slot(lex, sent, &group));
                    k = j;
                    continue;
                }
                let lower = tok.surface.to_lowercase();
                let slot = if is_noun(&tok.pos) {
                    let base = base_form(&tok.lemma, &tok.surface);
                    let majority = store.majority_form(group, &tok.surface).unwrap_or_else(|| tok.surface.clone());
                    let (lemma, capitalized) = if majority.chars().count() > 1 && is_all_caps(&majority) {
                        (base.to_uppercase(), false)
                    } else if is_capitalized(&majority) {
                        (base.to_lowercase(), true)
                    } else {
                        (base.to_lowercase(), false)
                    };
                    PlanSlot::Noun {
                        lemma,
                        number: if tok.pos == "NNS" || tok.pos == "NNPS" {
                            Number::Plural
                        } else {
                            Number::Singular
                        },
                        capitalized,
                    }
                } else if tok.pos.starts_with("JJ") {
                    PlanSlot::Adjective {
                        lemma: base_form(&tok.lemma, &tok.surface).to_lowercase(),
                    }
                } else if tok.pos == "IN" || tok.pos == "TO" {
                    PlanSlot::Preposition { form: lower }
                } else {
                    PlanSlot::FixedString {
                        text: tok.surface.clone(),
                    }
                };
                slots.push(slot);
                k += 1;
            }
        }
    }

    // cases and agreement from the chosen parse
    let verb_tokens: Vec<(usize, &Vec<usize>)> = verb_groups.iter().map(|(s, g)| (*s, g)).collect();
    let mut subjects: Vec<(usize, usize)> = Vec::new();
    for &(slot, span) in &ref_cases {
        let labels = anchor_labels(sent, &span);
        let governed_by_verb = |label: DepLabel| {
            sent.span_roots(&span).into_iter().any(|r| {
                sent.head_of(r).is_some_and(|d| {
                    d.label == label && verb_tokens.iter().any(|(_, g)| g.contains(&d.head))
                })
            })
        };
        let last_is_possessive = span.end > span.start && sent.tokens[span.end - 1].pos == "POS";
        let case = if last_is_possessive || labels.contains(&DepLabel::Poss) {
            Case::Possessive
        } else if labels.contains(&DepLabel::Subj) {
            Case::Nominative
        } else if labels.contains(&DepLabel::Obj)
            || labels.contains(&DepLabel::PrepComp)
            || verb_groups.iter().any(|(v, _)| *v < slot)
        {
            Case::Accusative
        } else {
            Case::Nominative
        };
        if let PlanSlot::Ref { case: c, .. } = &mut slots[slot] {
            if *c != Case::Possessive {
                *c = case;
            }
        }
        if governed_by_verb(DepLabel::Subj) {
            subject_ref = true;
            for (vslot, g) in &verb_tokens {
                let governs = sent.span_roots(&span).into_iter().any(|r| {
                    sent.head_of(r)
                        .is_some_and(|d| d.label == DepLabel::Subj && g.contains(&d.head))
                });
                if governs {
                    subjects.push((*vslot, slot));
                }
            }
        }
        if governed_by_verb(DepLabel::Obj) {
            object_ref = true;
        }
    }
    for (vslot, _) in &verb_groups {
        let target = subjects
            .iter()
            .find(|(v, _)| v == vslot)
            .map(|(_, s)| *s)
            .or_else(|| {
                (0..*vslot).rev().find(|&i| {
                    matches!(slots[i], PlanSlot::Ref { .. } | PlanSlot::Noun { .. })
                })
            });
        if let PlanSlot::Verb { agr, .. } = &mut slots[*vslot] {
            *agr = target;
        }
    }
    let original = SentencePlan::new(slots);
    let (plan, repaired) = repair_plan(&original);
    Ok(PlanDraft {
        plan,
        original,
        repaired,
        subject_ref,
        object_ref,
    })
}

fn most_frequent<T: PartialEq>(items: &[T]) -> usize {
    let mut best = 0;
    let mut best_count = 0;
    for (i, item) in items.iter().enumerate() {
        let count = items.iter().filter(|x| *x == item).count();
        if count > best_count {
            best = i;
            best_count = count;
        }
    }
    best
}

fn most_frequent_some<T: PartialEq>(items: &[Option<T>]) -> Option<usize> {
    let mut best = None;
    let mut best_count = 0;
    for (i, item) in items.iter().enumerate() {
        if item.is_none() {
            continue;
        }
        let count = items.iter().filter(|x| *x == item).count();
        if count > best_count {
            best = Some(i);
            best_count = count;
        }
    }
    best
}

/// A plan whose only verb is a bare past participle followed by a preposition
/// becomes present passive; a bare present participle becomes progressive.
pub fn repair_plan(plan: &SentencePlan) -> (SentencePlan, bool) {
    let verbs: Vec<usize> = (0..plan.slots.len()).filter(|&i| plan.slots[i].is_verb()).collect();
    let [v] = verbs[..] else {
        return (plan.clone(), false);
    };
    let mut out = plan.clone();
    let followed_by_prep = matches!(plan.slots.get(v + 1), Some(PlanSlot::Preposition { .. }));
    let repaired = match &mut out.slots[v] {
        PlanSlot::Verb {
            form, voice, tense, ..
        } => match form {
            VerbForm::PastParticiple if followed_by_prep => {
                *form = VerbForm::Finite;
                *voice = Voice::Passive;
                *tense = Tense::Present;
                true
            }
            VerbForm::PresentParticiple => {
                *form = VerbForm::Progressive;
                *tense = Tense::Present;
                true
            }
            _ => false,
        },
        _ => false,
    };
    (out, repaired)
}
