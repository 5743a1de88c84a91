//! Offline stand-in for web search: pre-annotated documents grouped by the
//! entity or relation they were retrieved for, with boolean, phrase and
//! stem-overlap queries.
//!
//! # File format
//!
//! A corpus file is a sequence of document records. Blank lines and lines
//! starting with `#` are ignored.
//!
//! ```text
//! group :madeFrom
//! doc d1 query=q1 rank=1
//! s wellformed=1 score=-20.5 :: Semillon/NNP/Semillon is/VBZ/be made/VBN/make from/IN/from Semillon/JJ/Semillon grapes/NNS/grape :: NP(0,1,1) NP(4,6,1) :: subj(2,0) prepcomp(3,5)
//! end
//! ```
//!
//! * `group <key>` switches the group for the documents that follow; before
//!   the first directive the group passed to [`CorpusBuilder::ingest`] is used.
//! * `doc <id> query=<query-id> rank=<n>` opens a record, `end` closes it.
//! * Each `s` line is one sentence with up to three `::`-separated sections:
//!   tokens as `surface/POS/lemma` (split at the last two slashes), noun
//!   phrase spans `NP(start,end,base)` with half-open 0-based token indices
//!   and `base` 0 or 1, and dependencies `label(head,dependent)` with labels
//!   `subj`, `obj`, `prepcomp`, `poss`, `det`, `amod` or `other`.
//! * `wellformed` defaults to 1; `score` is optional.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::text::{self, IdfSource};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("record {record} (line {line}): {message}")]
    Malformed {
        record: usize,
        line: usize,
        message: String,
    },
    #[error("empty query")]
    EmptyQuery,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedToken {
    pub surface: String,
    pub pos: String,
    pub lemma: String,
    pub stem: String,
}

impl AnnotatedToken {
    pub fn new(surface: &str, pos: &str, lemma: &str) -> Self {
        Self {
            surface: surface.to_string(),
            pos: pos.to_string(),
            lemma: lemma.to_string(),
            stem: text::stem(surface),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NpSpan {
    pub start: usize,
    pub end: usize,
    pub base: bool,
}

impl NpSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn overlaps(&self, other: &NpSpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, index: usize) -> bool {
        (self.start..self.end).contains(&index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DepLabel {
    Subj,
    Obj,
    PrepComp,
    Poss,
    Det,
    Amod,
    Other,
}

impl DepLabel {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "subj" => Self::Subj,
            "obj" => Self::Obj,
            "prepcomp" => Self::PrepComp,
            "poss" => Self::Poss,
            "det" => Self::Det,
            "amod" => Self::Amod,
            "other" => Self::Other,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dependency {
    pub head: usize,
    pub dependent: usize,
    pub label: DepLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedSentence {
    pub tokens: Vec<AnnotatedToken>,
    pub np_spans: Vec<NpSpan>,
    pub dependencies: Vec<Dependency>,
    pub well_formed: bool,
    pub parse_score: Option<f64>,
}

impl AnnotatedSentence {
    pub fn surfaces(&self, span: std::ops::Range<usize>) -> Vec<String> {
        self.tokens[span].iter().map(|t| t.surface.clone()).collect()
    }

    /// Governor of `dependent`, if any.
    pub fn head_of(&self, dependent: usize) -> Option<&Dependency> {
        self.dependencies.iter().find(|d| d.dependent == dependent)
    }

    /// Tokens of `span` whose governor lies outside the span (or is absent).
    pub fn span_roots(&self, span: &NpSpan) -> Vec<usize> {
        (span.start..span.end)
            .filter(|&i| self.head_of(i).is_none_or(|d| !span.contains(d.head)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub rank: u32,
    pub query_id: String,
    pub group: String,
    pub sentences: Vec<AnnotatedSentence>,
}

/// Global reference to one sentence of the store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SentenceId {
    pub doc: usize,
    pub sent: usize,
}

impl fmt::Display for SentenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.doc, self.sent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchMode {
    /// Any stem of any name occurs in the sentence.
    AnyNameWord,
    /// Every name contributes at least one stem to the sentence.
    EachName,
}

#[derive(Debug, Clone)]
pub struct CorpusConfig {
    pub max_docs_per_query: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            max_docs_per_query: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub documents: usize,
    pub sentences: usize,
}

/// Single-writer build phase; [`CorpusBuilder::freeze`] produces the
/// read-only store.
#[derive(Debug, Default)]
pub struct CorpusBuilder {
    config: CorpusConfig,
    docs: Vec<DocumentRecord>,
    keys: HashSet<(String, String, String)>,
}

fn malformed(record: usize, line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Malformed {
        record,
        line,
        message: message.into(),
    }
}

fn parse_triple_args(s: &str, name: &str) -> Option<Vec<usize>> {
    let inner = s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    inner.split(',').map(|p| p.trim().parse().ok()).collect()
}

fn parse_sentence(body: &str, record: usize, line: usize) -> Result<AnnotatedSentence, CorpusError> {
    let mut sections = body.split("::");
    let header = sections.next().unwrap_or("").trim();
    let mut well_formed = true;
    let mut parse_score = None;
    for field in header.split_whitespace() {
        if let Some(v) = field.strip_prefix("wellformed=") {
            well_formed = match v {
                "1" => true,
                "0" => false,
                _ => return Err(malformed(record, line, format!("bad wellformed value {v:?}"))),
            };
        } else if let Some(v) = field.strip_prefix("score=") {
            parse_score = Some(
                v.parse::<f64>()
                    .map_err(|_| malformed(record, line, format!("bad score {v:?}")))?,
            );
        } else {
            return Err(malformed(record, line, format!("unknown sentence field {field:?}")));
        }
    }
    let token_section = sections
        .next()
        .ok_or_else(|| malformed(record, line, "sentence without tokens"))?;
    let mut tokens = Vec::new();
    for item in token_section.split_whitespace() {
        let mut parts = item.rsplitn(3, '/');
        let lemma = parts.next();
        let pos = parts.next();
        let surface = parts.next();
        match (surface, pos, lemma) {
            (Some(s), Some(p), Some(l)) if !s.is_empty() && !p.is_empty() && !l.is_empty() => {
                tokens.push(AnnotatedToken::new(s, p, l))
            }
            _ => return Err(malformed(record, line, format!("bad token {item:?}"))),
        }
    }
    if tokens.is_empty() {
        return Err(malformed(record, line, "sentence without tokens"));
    }
    let mut np_spans = Vec::new();
    if let Some(np_section) = sections.next() {
        for item in np_section.split_whitespace() {
            let args = parse_triple_args(item, "NP")
                .filter(|a| a.len() == 3 && a[2] <= 1)
                .ok_or_else(|| malformed(record, line, format!("bad noun phrase {item:?}")))?;
            let span = NpSpan {
                start: args[0],
                end: args[1],
                base: args[2] == 1,
            };
            if span.start >= span.end || span.end > tokens.len() {
                return Err(malformed(
                    record,
                    line,
                    format!("noun phrase {item} out of bounds for {} tokens", tokens.len()),
                ));
            }
            np_spans.push(span);
        }
    }
    let mut dependencies: Vec<Dependency> = Vec::new();
    if let Some(dep_section) = sections.next() {
        for item in dep_section.split_whitespace() {
            let open = item
                .find('(')
                .ok_or_else(|| malformed(record, line, format!("bad dependency {item:?}")))?;
            let label = DepLabel::parse(&item[..open])
                .ok_or_else(|| malformed(record, line, format!("unknown dependency label in {item:?}")))?;
            let args = parse_triple_args(item, &item[..open])
                .filter(|a| a.len() == 2)
                .ok_or_else(|| malformed(record, line, format!("bad dependency {item:?}")))?;
            let (head, dependent) = (args[0], args[1]);
            if head >= tokens.len() || dependent >= tokens.len() || head == dependent {
                return Err(malformed(record, line, format!("dependency {item} out of bounds")));
            }
            if dependencies.iter().any(|d| d.dependent == dependent) {
                return Err(malformed(
                    record,
                    line,
                    format!("token {dependent} has more than one governor"),
                ));
            }
            dependencies.push(Dependency {
                head,
                dependent,
                label,
            });
        }
    }
    if sections.next().is_some() {
        return Err(malformed(record, line, "too many sections"));
    }
    Ok(AnnotatedSentence {
        tokens,
        np_spans,
        dependencies,
        well_formed,
        parse_score,
    })
}

impl CorpusBuilder {
    pub fn new(config: CorpusConfig) -> Self {
        Self {
            config,
            ..Default::default()
        }
    }

    pub fn ingest(&mut self, path: impl AsRef<Path>, group: &str) -> Result<IngestReport, CorpusError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        self.ingest_str(&text, group)
    }

    /// Parses `text` and adds its documents. Either every record of the input
    /// is added or none is.
    pub fn ingest_str(&mut self, text: &str, group: &str) -> Result<IngestReport, CorpusError> {
        let mut group = group.to_string();
        let mut pending: Vec<DocumentRecord> = Vec::new();
        let mut keys = self.keys.clone();
        let mut current: Option<DocumentRecord> = None;
        let mut record = 0;
        let mut report = IngestReport::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (keyword, rest) = trimmed
                .split_once(char::is_whitespace)
                .map(|(k, r)| (k, r.trim()))
                .unwrap_or((trimmed, ""));
            match keyword {
                "group" => {
                    if current.is_some() {
                        return Err(malformed(record, line, "group directive inside a document"));
                    }
                    if rest.is_empty() {
                        return Err(malformed(record, line, "group needs a key"));
                    }
                    group = rest.to_string();
                }
                "doc" => {
                    if current.is_some() {
                        return Err(malformed(record, line, "document not closed with end"));
                    }
                    record += 1;
                    let mut fields = rest.split_whitespace();
                    let doc_id = fields
                        .next()
                        .ok_or_else(|| malformed(record, line, "doc needs an id"))?
                        .to_string();
                    let mut query_id = None;
                    let mut rank = None;
                    for f in fields {
                        if let Some(v) = f.strip_prefix("query=") {
                            query_id = Some(v.to_string());
                        } else if let Some(v) = f.strip_prefix("rank=") {
                            rank = Some(
                                v.parse::<u32>()
                                    .ok()
                                    .filter(|r| *r >= 1)
                                    .ok_or_else(|| malformed(record, line, format!("bad rank {v:?}")))?,
                            );
                        } else {
                            return Err(malformed(record, line, format!("unknown doc field {f:?}")));
                        }
                    }
                    let query_id = query_id.ok_or_else(|| malformed(record, line, "doc needs query="))?;
                    let rank = rank.ok_or_else(|| malformed(record, line, "doc needs rank="))?;
                    if !keys.insert((group.clone(), query_id.clone(), doc_id.clone())) {
                        return Err(malformed(
                            record,
                            line,
                            format!("duplicate doc_id {doc_id} for query {query_id}"),
                        ));
                    }
                    current = Some(DocumentRecord {
                        doc_id,
                        rank,
                        query_id,
                        group: group.clone(),
                        sentences: Vec::new(),
                    });
                }
                "s" => {
                    let doc = current
                        .as_mut()
                        .ok_or_else(|| malformed(record, line, "sentence outside a document"))?;
                    doc.sentences.push(parse_sentence(rest, record, line)?);
                }
                "end" => {
                    let doc = current
                        .take()
                        .ok_or_else(|| malformed(record, line, "end without doc"))?;
                    report.documents += 1;
                    report.sentences += doc.sentences.len();
                    pending.push(doc);
                }
                other => return Err(malformed(record, line, format!("unknown keyword {other:?}"))),
            }
        }
        if current.is_some() {
            return Err(malformed(record, text.lines().count(), "document not closed with end"));
        }
        self.docs.extend(pending);
        self.keys = keys;
        Ok(report)
    }

    pub fn document_count(&self) -> usize {
        self.docs.len()
    }

    /// Applies the per-query document cap and builds the indexes.
    pub fn freeze(self) -> CorpusStore {
        let mut by_query: BTreeMap<(String, String), Vec<usize>> = BTreeMap::new();
        for (i, d) in self.docs.iter().enumerate() {
            by_query
                .entry((d.group.clone(), d.query_id.clone()))
                .or_default()
                .push(i);
        }
        let mut keep = vec![false; self.docs.len()];
        for (_, mut idx) in by_query {
            idx.sort_by(|a, b| {
                let (da, db) = (&self.docs[*a], &self.docs[*b]);
                (da.rank, &da.doc_id).cmp(&(db.rank, &db.doc_id))
            });
            for i in idx.into_iter().take(self.config.max_docs_per_query) {
                keep[i] = true;
            }
        }
        let docs: Vec<DocumentRecord> = self
            .docs
            .into_iter()
            .zip(keep)
            .filter_map(|(d, k)| k.then_some(d))
            .collect();
        CorpusStore::build(docs)
    }
}

#[derive(Debug, Default, Clone)]
struct GroupIndex {
    docs: Vec<usize>,
    stem_docs: HashMap<String, BTreeSet<usize>>,
    term_df: HashMap<String, usize>,
    surface_positions: HashMap<String, Vec<(SentenceId, usize)>>,
    surface_forms: HashMap<String, BTreeMap<String, usize>>,
}

/// Frozen, read-only corpus.
#[derive(Debug, Clone, Default)]
pub struct CorpusStore {
    docs: Vec<DocumentRecord>,
    groups: BTreeMap<String, GroupIndex>,
    lemmas: HashMap<String, BTreeMap<String, usize>>,
}

impl CorpusStore {
    pub fn build(docs: Vec<DocumentRecord>) -> Self {
        let mut groups: BTreeMap<String, GroupIndex> = BTreeMap::new();
        let mut lemmas: HashMap<String, BTreeMap<String, usize>> = HashMap::new();
        for (di, doc) in docs.iter().enumerate() {
            let g = groups.entry(doc.group.clone()).or_default();
            g.docs.push(di);
            let mut doc_terms: HashSet<String> = HashSet::new();
            for (si, sent) in doc.sentences.iter().enumerate() {
                let sid = SentenceId { doc: di, sent: si };
                for (ti, tok) in sent.tokens.iter().enumerate() {
                    if !tok.stem.is_empty() {
                        g.stem_docs.entry(tok.stem.clone()).or_default().insert(di);
                    }
                    let lower = tok.surface.to_lowercase();
                    g.surface_positions.entry(lower.clone()).or_default().push((sid, ti));
                    *g.surface_forms
                        .entry(lower.clone())
                        .or_default()
                        .entry(tok.surface.clone())
                        .or_default() += 1;
                    *lemmas
                        .entry(lower)
                        .or_default()
                        .entry(tok.lemma.to_lowercase())
                        .or_default() += 1;
                }
                doc_terms.extend(text::content_terms(&sent.surfaces(0..sent.tokens.len())));
            }
            for t in doc_terms {
                *g.term_df.entry(t).or_default() += 1;
            }
        }
        Self { docs, groups, lemmas }
    }

    pub fn document_count(&self) -> usize {
        self.docs.len()
    }

    pub fn documents(&self) -> &[DocumentRecord] {
        &self.docs
    }

    pub fn document(&self, index: usize) -> &DocumentRecord {
        &self.docs[index]
    }

    pub fn groups(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str)
    }

    pub fn has_group(&self, group: &str) -> bool {
        self.groups.contains_key(group)
    }

    pub fn group_documents(&self, group: &str) -> &[usize] {
        self.groups.get(group).map(|g| g.docs.as_slice()).unwrap_or(&[])
    }

    pub fn sentence(&self, id: SentenceId) -> &AnnotatedSentence {
        &self.docs[id.doc].sentences[id.sent]
    }

    pub fn group_sentences(&self, group: &str) -> Vec<SentenceId> {
        self.group_documents(group)
            .iter()
            .flat_map(|&d| {
                (0..self.docs[d].sentences.len()).map(move |s| SentenceId { doc: d, sent: s })
            })
            .collect()
    }

    /// Documents of `group` containing every term (after stemming), ordered by
    /// stored rank.
    pub fn boolean_search<S: AsRef<str>>(&self, terms: &[S], group: &str) -> Result<Vec<&DocumentRecord>, CorpusError> {
        let stems: Vec<String> = terms
            .iter()
            .flat_map(|t| text::split_phrase(t.as_ref()))
            .map(|t| text::stem(&t))
            .filter(|s| !s.is_empty())
            .collect();
        if stems.is_empty() {
            return Err(CorpusError::EmptyQuery);
        }
        let Some(g) = self.groups.get(group) else {
            return Ok(Vec::new());
        };
        let mut result: Option<BTreeSet<usize>> = None;
        for s in &stems {
            let docs = g.stem_docs.get(s).cloned().unwrap_or_default();
            result = Some(match result {
                None => docs,
                Some(acc) => acc.intersection(&docs).copied().collect(),
            });
        }
        let mut docs: Vec<&DocumentRecord> = result
            .unwrap_or_default()
            .into_iter()
            .map(|d| &self.docs[d])
            .collect();
        docs.sort_by(|a, b| (a.rank, &a.query_id, &a.doc_id).cmp(&(b.rank, &b.query_id, &b.doc_id)));
        Ok(docs)
    }

    /// Occurrences of the exact contiguous surface sequence (case-insensitive)
    /// as `(sentence, start index)`.
    pub fn phrase_occurrences<S: AsRef<str>>(&self, tokens: &[S], group: &str) -> Vec<(SentenceId, usize)> {
        let lowered: Vec<String> = tokens.iter().map(|t| t.as_ref().to_lowercase()).collect();
        let Some(first) = lowered.first() else {
            return Vec::new();
        };
        let Some(g) = self.groups.get(group) else {
            return Vec::new();
        };
        let Some(positions) = g.surface_positions.get(first) else {
            return Vec::new();
        };
        positions
            .iter()
            .filter(|(sid, start)| {
                let sent = self.sentence(*sid);
                start + lowered.len() <= sent.tokens.len()
                    && lowered
                        .iter()
                        .enumerate()
                        .all(|(k, w)| sent.tokens[start + k].surface.to_lowercase() == *w)
            })
            .copied()
            .collect()
    }

    /// Number of distinct documents containing the phrase.
    pub fn phrase_search<S: AsRef<str>>(&self, tokens: &[S], group: &str) -> Result<usize, CorpusError> {
        if tokens.is_empty() {
            return Err(CorpusError::EmptyQuery);
        }
        let docs: BTreeSet<usize> = self
            .phrase_occurrences(tokens, group)
            .into_iter()
            .map(|(s, _)| s.doc)
            .collect();
        Ok(docs.len())
    }

    /// Sentences of `group` whose stems overlap the names under `mode`. Stop
    /// words of the names are not used for matching.
    pub fn candidate_sentences<S: AsRef<str>>(&self, names: &[Vec<S>], group: &str, mode: MatchMode) -> Result<Vec<SentenceId>, CorpusError> {
        if names.is_empty() {
            return Err(CorpusError::EmptyQuery);
        }
        let name_stems: Vec<HashSet<String>> = names
            .iter()
            .map(|n| {
                n.iter()
                    .flat_map(|w| text::split_phrase(w.as_ref()))
                    .filter(|w| !text::is_stop_word(w))
                    .map(|w| text::stem(&w))
                    .filter(|s| !s.is_empty())
                    .collect()
            })
            .collect();
        let any: HashSet<&String> = name_stems.iter().flatten().collect();
        let matches = |sent: &AnnotatedSentence| {
            let stems: HashSet<&String> = sent.tokens.iter().map(|t| &t.stem).collect();
            match mode {
                MatchMode::AnyNameWord => stems.iter().any(|s| any.contains(s)),
                MatchMode::EachName => name_stems
                    .iter()
                    .all(|n| n.iter().any(|s| stems.contains(s))),
            }
        };
        Ok(self
            .group_sentences(group)
            .into_iter()
            .filter(|id| matches(self.sentence(*id)))
            .collect())
    }

    /// Inverse document frequencies over the documents of one group.
    pub fn idf(&self, group: &str) -> GroupIdf<'_> {
        GroupIdf {
            index: self.groups.get(group),
        }
    }

    /// The most frequent capitalization of `word` among the group's tokens
    /// (ties go to the form with the fewest capitals).
    pub fn majority_form(&self, group: &str, word: &str) -> Option<String> {
        let forms = self.groups.get(group)?.surface_forms.get(&word.to_lowercase())?;
        let capitals = |f: &str| f.chars().filter(|c| c.is_uppercase()).count();
        forms
            .iter()
            .max_by(|a, b| {
                a.1.cmp(b.1)
                    .then_with(|| capitals(b.0).cmp(&capitals(a.0)))
                    .then_with(|| b.0.cmp(a.0))
            })
            .map(|(f, _)| f.clone())
    }

    /// The most frequent lemma annotated for a surface word anywhere in the
    /// corpus.
    pub fn lemma_of(&self, word: &str) -> Option<String> {
        let lemmas = self.lemmas.get(&word.to_lowercase())?;
        lemmas
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(l, _)| l.clone())
    }
}

pub struct GroupIdf<'a> {
    index: Option<&'a GroupIndex>,
}

impl GroupIdf<'_> {
    pub fn document_count(&self) -> usize {
        self.index.map_or(0, |g| g.docs.len())
    }

    pub fn document_frequency(&self, term: &str) -> usize {
        self.index
            .and_then(|g| g.term_df.get(term).copied())
            .unwrap_or(0)
    }
}

impl IdfSource for GroupIdf<'_> {
    fn idf(&self, term: &str) -> f64 {
        text::smoothed_idf(self.document_count(), self.document_frequency(term))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
group wine
doc d1 query=q1 rank=1
s :: Semillon/NNP/Semillon is/VBZ/be made/VBN/make from/IN/from Semillon/JJ/Semillon grapes/NNS/grape :: NP(0,1,1) NP(4,6,1) :: subj(2,0) prepcomp(3,5)
end
doc d2 query=q1 rank=2
s wellformed=0 score=-3.5 :: Wine/NN/wine is/VBZ/be made/VBN/make from/IN/from grapes/NNS/grape :: NP(0,1,1) NP(4,5,1)
end
doc d3 query=q2 rank=1
s :: Gasoline/NN/gasoline comes/VBZ/come from/IN/from petroleum/NN/petroleum
end
";

    fn store() -> CorpusStore {
        let mut b = CorpusBuilder::new(CorpusConfig::default());
        let report = b.ingest_str(SAMPLE, "default").unwrap();
        assert_eq!(report.documents, 3);
        b.freeze()
    }

    #[test]
    fn ingests_documents_and_sentences() {
        let s = store();
        assert_eq!(s.document_count(), 3);
        assert_eq!(s.group_documents("wine").len(), 3);
        let sent = &s.document(1).sentences[0];
        assert!(!sent.well_formed);
        assert_eq!(sent.parse_score, Some(-3.5));
    }

    #[test]
    fn np_span_out_of_bounds_is_rejected() {
        let mut b = CorpusBuilder::default();
        let err = b
            .ingest_str("doc d1 query=q rank=1\ns :: a/DT/a :: NP(0,2,1)\nend\n", "g")
            .unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { record: 1, line: 2, .. }));
        assert_eq!(b.document_count(), 0);
    }

    #[test]
    fn duplicate_doc_id_within_query_is_rejected() {
        let mut b = CorpusBuilder::default();
        let err = b
            .ingest_str(
                "doc d1 query=q rank=1\ns :: a/DT/a\nend\ndoc d1 query=q rank=2\ns :: b/DT/b\nend\n",
                "g",
            )
            .unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { record: 2, .. }));
    }

    #[test]
    fn boolean_search_requires_every_stem() {
        let s = store();
        let hits = s.boolean_search(&["made", "grape"], "wine").unwrap();
        let ids: Vec<_> = hits.iter().map(|d| d.doc_id.as_str()).collect();
        assert_eq!(ids, ["d1", "d2"]);
        assert!(s.boolean_search(&["zinfandel"], "wine").unwrap().is_empty());
        assert!(matches!(
            s.boolean_search::<&str>(&[], "wine"),
            Err(CorpusError::EmptyQuery)
        ));
    }

    #[test]
    fn phrase_search_counts_documents() {
        let s = store();
        assert_eq!(s.phrase_search(&["is", "made", "from"], "wine").unwrap(), 2);
        assert_eq!(s.phrase_search(&["IS", "Made"], "wine").unwrap(), 2);
        assert_eq!(s.phrase_search(&["made", "of"], "wine").unwrap(), 0);
        assert_eq!(s.phrase_search(&["from"], "wine").unwrap(), 3);
    }

    #[test]
    fn candidate_sentences_each_mode_needs_both_names() {
        let s = store();
        let names = vec![vec!["wine"], vec!["grape"]];
        let hits = s.candidate_sentences(&names, "wine", MatchMode::EachName).unwrap();
        assert_eq!(hits, vec![SentenceId { doc: 1, sent: 0 }]);
        let any = s
            .candidate_sentences(&[vec!["Semillon"]], "wine", MatchMode::AnyNameWord)
            .unwrap();
        assert_eq!(any, vec![SentenceId { doc: 0, sent: 0 }]);
        assert!(s
            .candidate_sentences(&[vec!["x"]], "missing", MatchMode::AnyNameWord)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn max_docs_per_query_keeps_best_ranks() {
        let mut b = CorpusBuilder::new(CorpusConfig {
            max_docs_per_query: 1,
        });
        b.ingest_str(SAMPLE, "g").unwrap();
        let s = b.freeze();
        let ids: Vec<_> = s.documents().iter().map(|d| d.doc_id.as_str()).collect();
        assert_eq!(ids, ["d1", "d3"]);
    }

    #[test]
    fn majority_capitalization() {
        let mut b = CorpusBuilder::default();
        b.ingest_str(
            "doc d query=q rank=1\ns :: RED/JJ/red Red/JJ/red Red/JJ/red red/JJ/red\nend\n",
            "g",
        )
        .unwrap();
        let s = b.freeze();
        assert_eq!(s.majority_form("g", "red").as_deref(), Some("Red"));
        assert_eq!(s.lemma_of("Red").as_deref(), Some("red"));
    }
}
