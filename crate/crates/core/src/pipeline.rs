//! File loaders and the end-to-end stages shared by the command line tools.

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::CorpusStore;
use crate::features::{extraction_features, feature_names, normalize, RelationContext, FEATURE_COUNT};
use crate::maxent::{Instance, MaxEntError, Model};
use crate::nlname::{extract_names, infer_interest_scores, NameConfig, NameError};
use crate::ontology::{tokenize_identifier, EntityId, EntityKind, Ontology};
use crate::ranker::{
    boot_plans, bootstrap_extract, coverage, rank_sp, rank_sp_star, BootConfig, Method, RankedCandidate,
};
use crate::realize::{
    join_words, kind_of_plan, name_number, realize_nlname, realize_plan, realize_plan_tokens, realize_with_names,
    Lexicon, NameOptions, RefExpr,
};
use crate::sentplan::{extract_plans, ExtractConfig, PlanError, LOW_SEED_COUNT};
use crate::slots::{NLName, Number, SentencePlan, SlotError};
use crate::store::{EntityEntry, InterestEntry, NameEntry, PlanEntry, PlanSource, RelationEntry, ResourceBundle};
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("line {line}: {source}")]
    Name {
        line: usize,
        #[source]
        source: SlotError,
    },
    #[error("record {record} (line {line}): {message}")]
    Record { record: usize, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Parses a names file: one `raw-id<TAB>name notation` per line, `#` starts a
/// comment line. Later lines for the same entity replace earlier ones.
pub fn parse_manual_names(ontology: &Ontology, text: &str) -> Result<BTreeMap<EntityId, NLName>, LoadError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (id, notation) = trimmed
            .split_once(char::is_whitespace)
            .ok_or_else(|| LoadError::Format {
                line,
                message: "expected an entity id and a name".into(),
            })?;
        let entity = ontology.entity_id(id).ok_or_else(|| LoadError::Format {
            line,
            message: format!("unknown entity {id}"),
        })?;
        let name: NLName = notation
            .trim()
            .parse()
            .map_err(|source| LoadError::Name { line, source })?;
        out.insert(entity, name);
    }
    Ok(out)
}

pub fn load_manual_names(ontology: &Ontology, path: impl AsRef<Path>) -> Result<BTreeMap<EntityId, NLName>, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_manual_names(ontology, &text)
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{entity}: {source}")]
    Names {
        entity: String,
        #[source]
        source: NameError,
    },
    #[error("{relation}: {source}")]
    Plans {
        relation: String,
        #[source]
        source: PlanError,
    },
    #[error(transparent)]
    Model(#[from] MaxEntError),
    #[error("model was trained on a different feature schema")]
    Schema,
}

/// Settings of a pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub max_docs_per_query: usize,
    /// Cosine a noun phrase must exceed to match a seed name.
    pub threshold: f64,
    pub min_sentences: usize,
    pub top_k: usize,
    pub seed: u64,
    /// Templates the bootstrapping baseline aims for.
    pub boot_target: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            max_docs_per_query: 10,
            threshold: 0.1,
            min_sentences: 2,
            top_k: 5,
            seed: 0,
            boot_target: 150,
        }
    }
}

impl RunConfig {
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("max_docs_per_query".to_string(), self.max_docs_per_query.to_string()),
            ("threshold".to_string(), self.threshold.to_string()),
            ("min_sentences".to_string(), self.min_sentences.to_string()),
            ("top_k".to_string(), self.top_k.to_string()),
            ("seed".to_string(), self.seed.to_string()),
            ("boot_target".to_string(), self.boot_target.to_string()),
        ])
    }

    fn extract(&self) -> ExtractConfig {
        ExtractConfig {
            threshold: self.threshold,
            min_sentences: self.min_sentences,
        }
    }
}

/// Hash identifying the feature schema a model was trained on.
pub fn schema_hash(names: &[String]) -> String {
    hex::encode(Sha256::digest(names.join("\n").as_bytes()))
}

fn kind_label(kind: EntityKind) -> &'static str {
    match kind {
        EntityKind::Class => "class",
        EntityKind::Individual => "individual",
    }
}

/// "X is a kind of P." for a name and, with the name replaced by its
/// pronoun, the same sentence again.
fn name_examples(lex: &Lexicon, ontology: &Ontology, t: EntityId, name: &NLName) -> (String, String) {
    let parent = ontology
        .entity(t)
        .parents
        .first()
        .map(|&p| ontology.tok_name(p).text().to_lowercase())
        .unwrap_or_else(|| "thing".to_string());
    let plan = kind_of_plan();
    let o = RefExpr::new(parent, Number::Singular);
    let example = realize_plan(lex, &plan, &RefExpr::from_name(lex, name, false), &o).text;
    let options = NameOptions {
        pronoun: true,
        ..NameOptions::default()
    };
    let pronoun = RefExpr::new(realize_nlname(lex, name, &options), name_number(name, &options));
    (example, realize_plan(lex, &plan, &pronoun, &o).text)
}

/// Ranked name candidates of every entity.
pub fn name_entries(
    ontology: &Ontology,
    store: &CorpusStore,
    lex: &Lexicon,
    config: &RunConfig,
) -> Result<BTreeMap<String, EntityEntry>, PipelineError> {
    let name_config = NameConfig {
        top_k: config.top_k,
        seed: config.seed,
    };
    let mut out = BTreeMap::new();
    for (t, entity) in ontology.entities() {
        let raw = entity.id.raw.clone();
        let found = extract_names(ontology, store, lex, t, &name_config).map_err(|source| PipelineError::Names {
            entity: raw.clone(),
            source,
        })?;
        let candidates: Vec<NameEntry> = found
            .candidates
            .iter()
            .map(|c| {
                let (example, pronoun_example) = name_examples(lex, ontology, t, &c.name);
                NameEntry {
                    name: c.name.clone(),
                    phrase: c.phrase.clone(),
                    score: c.score,
                    crossed_edges: c.crossed_edges,
                    frequency: c.frequency,
                    realized: realize_nlname(lex, &c.name, &NameOptions::default()),
                    example,
                    pronoun_example,
                }
            })
            .collect();
        let mut warnings = Vec::new();
        if !found.alt_names.anonymous && candidates.is_empty() {
            warnings.push(if store.has_group(&raw) {
                "no candidates".to_string()
            } else {
                "no candidates: no documents".to_string()
            });
        }
        out.insert(
            raw.clone(),
            EntityEntry {
                kind: kind_label(entity.kind).to_string(),
                mentions: ontology.mention_count(&raw),
                anonymous: found.alt_names.anonymous,
                alt_names: found.alt_names.all().map(|n| n.text()).collect(),
                candidates,
                warnings,
            },
        );
    }
    Ok(out)
}

/// Names taken from a bundle: each entity's top candidate, or the candidate
/// `selector` marked first when a selector is given.
pub fn names_from_bundle(ontology: &Ontology, bundle: &ResourceBundle, selector: Option<&str>) -> BTreeMap<EntityId, NLName> {
    let chosen: BTreeMap<String, usize> = match selector {
        Some(sel) => bundle.selected_candidates(sel),
        None => bundle
            .entities
            .iter()
            .filter(|(_, e)| !e.candidates.is_empty())
            .map(|(t, _)| (t.clone(), 0))
            .collect(),
    };
    chosen
        .into_iter()
        .filter_map(|(target, c)| {
            let id = ontology.entity_id(&target)?;
            let entry = bundle.entities.get(&target)?;
            Some((id, entry.candidates.get(c)?.name.clone()))
        })
        .collect()
}

/// Interest of every statement whose two entities have names: zero when the
/// statement is obvious from the names.
pub fn interest_entries(
    ontology: &Ontology,
    store: &CorpusStore,
    lex: &Lexicon,
    names: &BTreeMap<EntityId, NLName>,
) -> Vec<InterestEntry> {
    infer_interest_scores(Some(store), lex, names, ontology.facts())
        .into_iter()
        .map(|a| InterestEntry {
            s: ontology.entity(a.triple.s).id.raw.clone(),
            relation: ontology.relation_name(a.triple.r),
            o: ontology.entity(a.triple.o).id.raw.clone(),
            interest: u8::from(!a.zero),
        })
        .collect()
}

/// Relation entries and the normalized feature rows behind them.
#[derive(Debug, Clone, Default)]
pub struct PlanRun {
    pub relations: BTreeMap<String, RelationEntry>,
    /// `relation#candidate` with its feature values.
    pub features: Vec<(String, Vec<f64>)>,
}

fn pattern_of(lex: &Lexicon, plan: &SentencePlan) -> String {
    let s = RefExpr::new("S", Number::Singular);
    let o = RefExpr::new("O", Number::Singular);
    join_words(&realize_plan_tokens(lex, plan, &s, &o))
}

/// Candidate plans of every relation ranked by SP and SP*, and by the
/// bootstrapping baseline when `boot` is set. Without a model every
/// candidate gets probability ½.
pub fn plan_entries(
    ontology: &Ontology,
    store: &CorpusStore,
    lex: &Lexicon,
    names: &BTreeMap<EntityId, NLName>,
    config: &RunConfig,
    model: Option<&Model>,
    boot: bool,
) -> Result<PlanRun, PipelineError> {
    if let Some(m) = model {
        if !m.schema.is_empty() && m.schema != schema_hash(&feature_names()) {
            return Err(PipelineError::Schema);
        }
    }
    let mut run = PlanRun::default();
    for (r, relation) in ontology.relations() {
        let raw = relation.id.raw.clone();
        let plan_error = |source| PipelineError::Plans {
            relation: raw.clone(),
            source,
        };
        let ex = extract_plans(ontology, store, lex, r, names, &config.extract()).map_err(plan_error)?;
        let mut warnings = Vec::new();
        if ex.seeds.is_empty() {
            warnings.push("no seed pairs".to_string());
        } else if ex.seeds.len() < LOW_SEED_COUNT {
            warnings.push(format!("low seed count: {} pairs", ex.seeds.len()));
        }
        let example_names = ontology
            .facts_of(r)
            .find_map(|t| Some((names.get(&t.s)?, names.get(&t.o)?)));
        let example = |plan: &SentencePlan| match example_names {
            Some((s, o)) => realize_with_names(lex, plan, s, o).text,
            None => realize_plan(lex, plan, &RefExpr::new("S", Number::Singular), &RefExpr::new("O", Number::Singular)).text,
        };

        let mut rows = if ex.plans.is_empty() {
            Vec::new()
        } else {
            let tokens: Vec<String> = tokenize_identifier(&relation.id)
                .tokens
                .iter()
                .map(|t| t.to_lowercase())
                .collect();
            let ctx = RelationContext::new(store, lex, &ex, tokens);
            extraction_features(&ctx).rows
        };
        normalize(&mut rows);
        let probabilities = rows
            .iter()
            .map(|row| match model {
                Some(m) => m.predict_proba(row),
                None => Ok(0.5),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        for (k, row) in rows.into_iter().enumerate() {
            debug_assert_eq!(row.len(), FEATURE_COUNT);
            run.features.push((format!("{raw}#{k}"), row));
        }

        let mut candidates: Vec<PlanEntry> = ex
            .plans
            .iter()
            .map(|c| PlanEntry {
                plan: c.plan.clone(),
                source: PlanSource::Classifier,
                templates: c.templates.iter().map(|&k| ex.templates[k].to_string()).collect(),
                pattern: pattern_of(lex, &c.plan),
                example: example(&c.plan),
                conf: None,
            })
            .collect();
        let mut rankings = BTreeMap::new();
        let sp = rank_sp(&raw, &probabilities);
        let star = rank_sp_star(&sp, |id| coverage(store, lex, &raw, &candidates[id].plan, &ex.seeds).coverage);
        rankings.insert(Method::Sp, sp.candidates);
        rankings.insert(Method::SpStar, star.candidates);

        if boot {
            let boot_config = BootConfig {
                target: config.boot_target,
                extract: config.extract(),
                ..BootConfig::default()
            };
            let result = bootstrap_extract(store, lex, &raw, ex.seeds.clone(), &boot_config).map_err(plan_error)?;
            let mut ranked = Vec::new();
            for (idx, plan) in boot_plans(store, lex, &raw, &result, config.top_k) {
                let conf = result.templates[idx].conf;
                let id = match candidates.iter().position(|c| c.plan == plan) {
                    Some(id) => id,
                    None => {
                        candidates.push(PlanEntry {
                            pattern: pattern_of(lex, &plan),
                            example: example(&plan),
                            plan,
                            source: PlanSource::Boot,
                            templates: vec![result.templates[idx].template.to_string()],
                            conf: Some(conf),
                        });
                        candidates.len() - 1
                    }
                };
                if candidates[id].conf.is_none() {
                    candidates[id].conf = Some(conf);
                }
                if !ranked.iter().any(|c: &RankedCandidate| c.id == id) {
                    ranked.push(RankedCandidate {
                        id,
                        probability: 0.0,
                        coverage: None,
                        score: conf,
                    });
                }
            }
            rankings.insert(Method::Boot, ranked);
        }

        run.relations.insert(
            raw.clone(),
            RelationEntry {
                mentions: ontology.mention_count(&raw),
                seed_count: ex.seeds.len(),
                low_confidence: ex.low_confidence,
                candidates,
                rankings,
                review: Some(Method::SpStar),
                warnings,
            },
        );
    }
    Ok(run)
}

/// Parses labeled training data: a header `id<TAB>label<TAB>feature…`, then
/// one record per line with label 1/0 (or true/false).
pub fn parse_labeled(text: &str) -> Result<(Vec<String>, Vec<Instance>), LoadError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or(LoadError::Format {
        line: 1,
        message: "missing header".into(),
    })?;
    let columns: Vec<&str> = header.split('\t').collect();
    if columns.len() < 3 || columns[0] != "id" || columns[1] != "label" {
        return Err(LoadError::Format {
            line: 1,
            message: "header needs id, label and at least one feature column".into(),
        });
    }
    let names: Vec<String> = columns[2..].iter().map(|c| c.to_string()).collect();
    let mut data = Vec::new();
    for (record, (i, line)) in lines.enumerate() {
        let bad = |message: String| LoadError::Record {
            record: record + 1,
            line: i + 1,
            message,
        };
        let cells: Vec<&str> = line.split('\t').collect();
        if cells.len() != columns.len() {
            return Err(bad(format!("expected {} fields, found {}", columns.len(), cells.len())));
        }
        let positive = match cells[1].trim() {
            "1" | "true" => true,
            "0" | "false" => false,
            other => return Err(bad(format!("bad label {other:?}"))),
        };
        let features = cells[2..]
            .iter()
            .map(|c| match c.trim().parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(bad(format!("bad feature value {c:?}"))),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        data.push(Instance::new(features, positive, cells[0]));
    }
    Ok((names, data))
}
