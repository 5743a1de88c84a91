//! Resource bundles: induced names and plans with their rankings, human
//! selections, and the metrics computed from selections.
//!
//! A bundle is a single JSON document with a versioned header. Maps are
//! ordered, so writing the same bundle twice yields the same bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ranker::{Method, RankedCandidate};
use crate::slots::{NLName, SentencePlan};

pub const BUNDLE_FORMAT: &str = "lexforge-bundle";
pub const BUNDLE_VERSION: u32 = 1;

/// Candidates shown per target during review and scored by the metrics.
pub const REVIEW_DEPTH: usize = 5;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed bundle: {0}")]
    Format(#[from] serde_json::Error),
    #[error("unsupported bundle header {format:?} version {version}")]
    Header { format: String, version: u32 },
    #[error("unknown target {0}")]
    UnknownTarget(String),
    #[error("target {target} has no candidate {candidate}")]
    UnknownCandidate { target: String, candidate: usize },
    #[error("invalid bundle: {0}")]
    Invalid(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NameEntry {
    pub name: NLName,
    /// The noun phrase the name was built from.
    pub phrase: String,
    pub score: f64,
    pub crossed_edges: usize,
    pub frequency: usize,
    /// The name realized on its own.
    pub realized: String,
    pub example: String,
    /// The example with the name replaced by a pronoun.
    pub pronoun_example: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityEntry {
    pub kind: String,
    /// Ontology statements mentioning the entity.
    pub mentions: usize,
    pub anonymous: bool,
    pub alt_names: Vec<String>,
    pub candidates: Vec<NameEntry>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanSource {
    Classifier,
    Boot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub plan: SentencePlan,
    pub source: PlanSource,
    pub templates: Vec<String>,
    /// The plan realized with S and O as placeholders.
    pub pattern: String,
    pub example: String,
    pub conf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationEntry {
    pub mentions: usize,
    pub seed_count: usize,
    pub low_confidence: bool,
    pub candidates: Vec<PlanEntry>,
    pub rankings: BTreeMap<Method, Vec<RankedCandidate>>,
    /// The ranking shown for review.
    pub review: Option<Method>,
    pub warnings: Vec<String>,
}

impl RelationEntry {
    /// Candidate ids in review order.
    pub fn review_order(&self) -> Vec<usize> {
        match self.review.and_then(|m| self.rankings.get(&m)) {
            Some(r) => r.iter().map(|c| c.id).collect(),
            None => (0..self.candidates.len()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterestEntry {
    pub s: String,
    pub relation: String,
    pub o: String,
    pub interest: u8,
}

/// One mark by one selector. `candidate: None` records that no candidate
/// was acceptable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub target: String,
    pub selector: String,
    pub candidate: Option<usize>,
    /// One-based position of the candidate in the review order.
    pub rank: Option<usize>,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceBundle {
    pub format: String,
    pub version: u32,
    /// SHA-256 of the ontology file.
    pub ontology_sha256: String,
    pub config: BTreeMap<String, String>,
    pub entities: BTreeMap<String, EntityEntry>,
    pub relations: BTreeMap<String, RelationEntry>,
    pub interest: Vec<InterestEntry>,
    pub selections: Vec<Selection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Entity,
    Relation,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl ResourceBundle {
    pub fn new(ontology_sha256: impl Into<String>) -> Self {
        Self {
            format: BUNDLE_FORMAT.to_string(),
            version: BUNDLE_VERSION,
            ontology_sha256: ontology_sha256.into(),
            config: BTreeMap::new(),
            entities: BTreeMap::new(),
            relations: BTreeMap::new(),
            interest: Vec::new(),
            selections: Vec::new(),
        }
    }

    pub fn target_kind(&self, target: &str) -> Option<TargetKind> {
        if self.entities.contains_key(target) {
            Some(TargetKind::Entity)
        } else if self.relations.contains_key(target) {
            Some(TargetKind::Relation)
        } else {
            None
        }
    }

    /// Candidate ids of a target in the order they are reviewed.
    pub fn review_order(&self, target: &str) -> Option<Vec<usize>> {
        if let Some(e) = self.entities.get(target) {
            return Some((0..e.candidates.len()).collect());
        }
        self.relations.get(target).map(RelationEntry::review_order)
    }

    fn candidate_count(&self, target: &str) -> Option<usize> {
        if let Some(e) = self.entities.get(target) {
            return Some(e.candidates.len());
        }
        self.relations.get(target).map(|r| r.candidates.len())
    }

    pub fn validate(&self) -> Result<(), StoreError> {
        if self.format != BUNDLE_FORMAT || self.version != BUNDLE_VERSION {
            return Err(StoreError::Header {
                format: self.format.clone(),
                version: self.version,
            });
        }
        for (id, r) in &self.relations {
            for (method, ranking) in &r.rankings {
                if let Some(c) = ranking.iter().find(|c| c.id >= r.candidates.len()) {
                    return Err(StoreError::Invalid(format!(
                        "{method} ranking of {id} refers to missing candidate {}",
                        c.id
                    )));
                }
            }
            if let Some(m) = r.review {
                if !r.rankings.contains_key(&m) {
                    return Err(StoreError::Invalid(format!("{id} is reviewed by missing {m} ranking")));
                }
            }
        }
        for s in &self.selections {
            let count = self
                .candidate_count(&s.target)
                .ok_or_else(|| StoreError::UnknownTarget(s.target.clone()))?;
            if let Some(c) = s.candidate {
                if c >= count {
                    return Err(StoreError::UnknownCandidate {
                        target: s.target.clone(),
                        candidate: c,
                    });
                }
            }
        }
        Ok(())
    }

    /// Canonical text of the bundle.
    pub fn to_canonical_json(&self) -> Result<String, StoreError> {
        self.validate()?;
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self, StoreError> {
        let bundle: Self = serde_json::from_str(text)?;
        bundle.validate()?;
        Ok(bundle)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), StoreError> {
        let path = path.as_ref();
        let text = self.to_canonical_json()?;
        std::fs::write(path, text).map_err(|source| StoreError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| StoreError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Marks `candidate` (or none) for `target` on behalf of `selector`.
    /// With `replace` the selector's earlier marks on the target are
    /// dropped; otherwise the mark is added to them. Marking none always
    /// drops the selector's other marks, and marking a candidate drops an
    /// earlier none. Repeating a mark changes nothing.
    pub fn record_selection(
        &mut self,
        target: &str,
        candidate: Option<usize>,
        selector: &str,
        replace: bool,
        timestamp: u64,
    ) -> Result<&Selection, StoreError> {
        let order = self
            .review_order(target)
            .ok_or_else(|| StoreError::UnknownTarget(target.to_string()))?;
        let rank = match candidate {
            Some(c) => Some(
                order
                    .iter()
                    .position(|&x| x == c)
                    .map(|p| p + 1)
                    .ok_or_else(|| StoreError::UnknownCandidate {
                        target: target.to_string(),
                        candidate: c,
                    })?,
            ),
            None => None,
        };
        let mine = |s: &Selection| s.target == target && s.selector == selector;
        let existing = self.selections.iter().position(|s| mine(s) && s.candidate == candidate);
        let keep_others = !replace && candidate.is_some();
        self.selections.retain(|s| {
            !mine(s) || s.candidate == candidate || (keep_others && s.candidate.is_some())
        });
        let idx = match existing {
            Some(_) => self
                .selections
                .iter()
                .position(|s| mine(s) && s.candidate == candidate)
                .expect("kept"),
            None => {
                self.selections.push(Selection {
                    target: target.to_string(),
                    selector: selector.to_string(),
                    candidate,
                    rank,
                    timestamp,
                });
                self.selections.len() - 1
            }
        };
        Ok(&self.selections[idx])
    }

    /// Distinct selector ids, sorted.
    pub fn selectors(&self) -> Vec<String> {
        self.selections
            .iter()
            .map(|s| s.selector.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Targets the selector has reviewed, with the ranks marked (empty for
    /// an explicit none).
    pub fn marks_of(&self, selector: &str) -> BTreeMap<String, BTreeSet<usize>> {
        let mut out: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        for s in self.selections.iter().filter(|s| s.selector == selector) {
            let entry = out.entry(s.target.clone()).or_default();
            if let Some(r) = s.rank {
                entry.insert(r);
            }
        }
        out
    }

    /// The top-ranked candidate marked by `selector` for each target.
    pub fn selected_candidates(&self, selector: &str) -> BTreeMap<String, usize> {
        let mut out: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for s in self.selections.iter().filter(|s| s.selector == selector) {
            if let (Some(c), Some(r)) = (s.candidate, s.rank) {
                let e = out.entry(s.target.clone()).or_insert((r, c));
                if r < e.0 {
                    *e = (r, c);
                }
            }
        }
        out.into_iter().map(|(t, (_, c))| (t, c)).collect()
    }
}

/// Agreement of a second judge with a first one treated as gold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub gold: String,
    pub other: String,
    /// Targets reviewed by both judges.
    pub targets: usize,
    pub micro_precision: Option<f64>,
    pub macro_precision: Option<f64>,
    pub gold_one_in_k: f64,
    pub other_one_in_k: f64,
    pub pseudo_recall: Option<f64>,
    pub kappa: f64,
}

/// Cohen's kappa over paired categorical choices. Perfect agreement on a
/// single category counts as 1.
pub fn cohens_kappa<T: Ord + Clone>(pairs: &[(T, T)]) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let n = pairs.len() as f64;
    let observed = pairs.iter().filter(|(a, b)| a == b).count() as f64 / n;
    let mut first: BTreeMap<T, f64> = BTreeMap::new();
    let mut second: BTreeMap<T, f64> = BTreeMap::new();
    for (a, b) in pairs {
        *first.entry(a.clone()).or_default() += 1.0 / n;
        *second.entry(b.clone()).or_default() += 1.0 / n;
    }
    let expected: f64 = first
        .iter()
        .map(|(c, p)| p * second.get(c).copied().unwrap_or(0.0))
        .sum();
    if (1.0 - expected).abs() < 1e-12 {
        return if observed >= 1.0 - 1e-12 { 1.0 } else { 0.0 };
    }
    (observed - expected) / (1.0 - expected)
}

/// Compares `other`'s marks to `gold`'s over the targets both reviewed.
/// Only the first [`REVIEW_DEPTH`] ranks count. Kappa compares the
/// top-most mark of each judge, with no mark as a sixth choice.
pub fn agreement_report(bundle: &ResourceBundle, gold: &str, other: &str) -> Result<AgreementReport, StoreError> {
    let within = |set: BTreeSet<usize>| -> BTreeSet<usize> { set.into_iter().filter(|&r| r <= REVIEW_DEPTH).collect() };
    let a = bundle.marks_of(gold);
    let b = bundle.marks_of(other);
    if gold == other || a.is_empty() || b.is_empty() {
        return Err(StoreError::InsufficientData(format!(
            "need marks from two selectors, got {gold:?} and {other:?}"
        )));
    }
    let shared: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = a
        .iter()
        .filter_map(|(t, ma)| b.get(t).map(|mb| (within(ma.clone()), within(mb.clone()))))
        .collect();
    if shared.is_empty() {
        return Err(StoreError::InsufficientData(format!("{gold} and {other} share no reviewed target")));
    }
    let n = shared.len() as f64;
    let both_marks: usize = shared.iter().map(|(x, y)| x.intersection(y).count()).sum();
    let other_marks: usize = shared.iter().map(|(_, y)| y.len()).sum();
    let per_target: Vec<f64> = shared
        .iter()
        .filter(|(_, y)| !y.is_empty())
        .map(|(x, y)| x.intersection(y).count() as f64 / y.len() as f64)
        .collect();
    let gold_any = shared.iter().filter(|(x, _)| !x.is_empty()).count();
    let both_any = shared.iter().filter(|(x, y)| !x.is_empty() && !y.is_empty()).count();
    let choices: Vec<(usize, usize)> = shared
        .iter()
        .map(|(x, y)| (x.first().copied().unwrap_or(0), y.first().copied().unwrap_or(0)))
        .collect();
    Ok(AgreementReport {
        gold: gold.to_string(),
        other: other.to_string(),
        targets: shared.len(),
        micro_precision: (other_marks > 0).then(|| both_marks as f64 / other_marks as f64),
        macro_precision: (!per_target.is_empty()).then(|| per_target.iter().sum::<f64>() / per_target.len() as f64),
        gold_one_in_k: gold_any as f64 / n,
        other_one_in_k: shared.iter().filter(|(_, y)| !y.is_empty()).count() as f64 / n,
        pseudo_recall: (gold_any > 0).then(|| both_any as f64 / gold_any as f64),
        kappa: cohens_kappa(&choices),
    })
}

/// Correctness of one target's ranked candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct JudgedRanking {
    /// Correctness by rank, first rank first.
    pub correct: Vec<bool>,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingMetrics {
    pub targets: usize,
    pub one_in_1: f64,
    pub one_in_3: f64,
    pub one_in_5: f64,
    pub mrr: f64,
    pub weighted_one_in_1: f64,
    pub weighted_one_in_3: f64,
    pub weighted_one_in_5: f64,
    pub weighted_mrr: f64,
}

/// 1-in-k and mean reciprocal rank over the first five ranks, plain and
/// weighted by each target's weight.
pub fn ranking_metrics(judged: &[JudgedRanking]) -> RankingMetrics {
    let first_correct = |j: &JudgedRanking| j.correct.iter().take(REVIEW_DEPTH).position(|&c| c).map(|p| p + 1);
    let mean = |weighted: bool, f: &dyn Fn(Option<usize>) -> f64| -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for j in judged {
            let w = if weighted { j.weight } else { 1.0 };
            num += w * f(first_correct(j));
            den += w;
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    };
    let within = |k: usize| move |r: Option<usize>| if r.is_some_and(|r| r <= k) { 1.0 } else { 0.0 };
    let reciprocal = |r: Option<usize>| r.map_or(0.0, |r| 1.0 / r as f64);
    RankingMetrics {
        targets: judged.len(),
        one_in_1: mean(false, &within(1)),
        one_in_3: mean(false, &within(3)),
        one_in_5: mean(false, &within(5)),
        mrr: mean(false, &reciprocal),
        weighted_one_in_1: mean(true, &within(1)),
        weighted_one_in_3: mean(true, &within(3)),
        weighted_one_in_5: mean(true, &within(5)),
        weighted_mrr: mean(true, &reciprocal),
    }
}

/// Judged rankings of the targets of one kind, with `gold`'s marks as
/// correctness and mention counts as weights. Targets `gold` did not
/// review are left out.
pub fn judge_bundle(bundle: &ResourceBundle, kind: TargetKind, gold: &str) -> Vec<JudgedRanking> {
    let marks = bundle.marks_of(gold);
    let mut out = Vec::new();
    for (target, ranks) in &marks {
        let (len, weight) = match (kind, bundle.entities.get(target), bundle.relations.get(target)) {
            (TargetKind::Entity, Some(e), _) => (e.candidates.len(), e.mentions),
            (TargetKind::Relation, _, Some(r)) => (r.review_order().len(), r.mentions),
            _ => continue,
        };
        out.push(JudgedRanking {
            correct: (1..=len.min(REVIEW_DEPTH)).map(|r| ranks.contains(&r)).collect(),
            weight: weight as f64,
        });
    }
    out
}
