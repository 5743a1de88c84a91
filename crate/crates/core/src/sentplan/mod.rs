//! Sentence plan induction for a relation: seed name pairs, anchor pairs,
//! templates and their conversion into filtered candidate plans.

mod convert;
mod filter;
mod seeds;
mod templates;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::corpus::{CorpusError, CorpusStore};
use crate::ontology::{EntityId, Ontology, RelationId};
use crate::realize::Lexicon;
use crate::slots::{NLName, SentencePlan};

pub use convert::{repair_plan, template_to_plan, PlanDraft};
pub use filter::{interior_variants, passes_phrase_filter, structurally_valid};
pub use seeds::{build_seed_pairs, seed_name, SeedPair};
pub use templates::{
    extend_templates, extract_templates, match_anchor_pairs, template_tokens, AnchorOccurrence, SeedMatch, Template,
    TemplateInstance, TemplateToken,
};

/// Relations with fewer seed pairs rarely yield usable plans.
pub const LOW_SEED_COUNT: usize = 10;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("no sentence provides tags for template \"{0}\"")]
    NoTags(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Debug, Clone)]
pub struct ExtractConfig {
    /// Cosine a noun phrase must exceed to match a seed name.
    pub threshold: f64,
    /// Distinct sentences a template must come from.
    pub min_sentences: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            threshold: 0.1,
            min_sentences: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidatePlan {
    pub plan: SentencePlan,
    /// Indices into [`Extraction::templates`].
    pub templates: Vec<usize>,
    pub repaired: bool,
    pub subject_ref: bool,
    pub object_ref: bool,
}

/// Everything extracted for one relation.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub group: String,
    pub seeds: Vec<SeedPair>,
    pub occurrences: Vec<AnchorOccurrence>,
    /// Base templates first, then their extensions.
    pub templates: Vec<Template>,
    pub plans: Vec<CandidatePlan>,
    pub low_confidence: bool,
}

/// Runs anchor matching, template extraction and extension, conversion and
/// filtering for the given seed pairs over the documents of `group`. The
/// phrase filter checks the plan as read off the template, before repairs.
pub fn extract_from_seeds(
    store: &CorpusStore,
    lex: &Lexicon,
    group: &str,
    seeds: Vec<SeedPair>,
    config: &ExtractConfig,
) -> Result<Extraction, PlanError> {
    let occurrences = match_anchor_pairs(store, group, &seeds, config.threshold)?;
    let min = config.min_sentences.max(1);
    let mut templates = extract_templates(store, &occurrences, min);
    let extended = extend_templates(store, &occurrences, &templates, 0, min);
    templates.extend(extended);

    let mut plans: Vec<CandidatePlan> = Vec::new();
    for (k, template) in templates.iter().enumerate() {
        let draft = template_to_plan(store, lex, group, template, &occurrences)?;
        if !structurally_valid(&draft.plan) || !passes_phrase_filter(store, lex, group, &draft.original) {
            continue;
        }
        match plans.iter_mut().find(|p| p.plan == draft.plan) {
            Some(p) => {
                p.templates.push(k);
                p.repaired |= draft.repaired;
                p.subject_ref |= draft.subject_ref;
                p.object_ref |= draft.object_ref;
            }
            None => plans.push(CandidatePlan {
                plan: draft.plan,
                templates: vec![k],
                repaired: draft.repaired,
                subject_ref: draft.subject_ref,
                object_ref: draft.object_ref,
            }),
        }
    }
    Ok(Extraction {
        group: group.to_string(),
        low_confidence: seeds.len() < LOW_SEED_COUNT,
        seeds,
        occurrences,
        templates,
        plans,
    })
}

/// Candidate plans of relation `r`; its documents form the group named by
/// the relation's raw identifier.
pub fn extract_plans(
    ontology: &Ontology,
    store: &CorpusStore,
    lex: &Lexicon,
    r: RelationId,
    names: &BTreeMap<EntityId, NLName>,
    config: &ExtractConfig,
) -> Result<Extraction, PlanError> {
    let seeds = build_seed_pairs(ontology, lex, r, names);
    let group = ontology.relation(r).id.raw.clone();
    extract_from_seeds(store, lex, &group, seeds, config)
}
