//! Simplified ontology: classes, individuals, a subclass/instance hierarchy and
//! object-property facts, reduced to message triples.
//!
//! The input is a line-oriented file:
//!
//! ```text
//! # comment
//! class :Wine
//! class :RedWine label "red wine"
//! individual :StEmilion
//! subclass :RedWine :Wine
//! equivalent :Vin :Wine
//! instance :StEmilion :Wine
//! fact :StEmilion :madeFrom :cabernetSauvignonGrape
//! ```

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: reference to undeclared entity {id}")]
    Dangling { line: usize, id: String },
    #[error("line {line}: {id} is declared twice")]
    Duplicate { line: usize, id: String },
    #[error("class hierarchy has a cycle through {0}")]
    Cycle(String),
    #[error("no entities")]
    Empty,
    #[error("unknown entity {0}")]
    UnknownEntity(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// An ontology identifier such as `:KalinCellarsSemillon`, with an optional
/// label that overrides identifier splitting.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Identifier {
    pub raw: String,
    pub label: Option<String>,
}

impl Identifier {
    pub fn new(raw: impl Into<String>) -> Self {
        Self {
            raw: raw.into(),
            label: None,
        }
    }

    pub fn with_label(raw: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            raw: raw.into(),
            label: Some(label.into()),
        }
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Class,
    Individual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationId(pub usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Entity {
    pub id: Identifier,
    pub kind: EntityKind,
    /// Parent classes (superclasses of a class, classes of an individual).
    pub parents: Vec<EntityId>,
    pub equivalents: Vec<EntityId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub id: Identifier,
}

/// The relation slot of a message triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TripleRelation {
    IsA,
    InstanceOf,
    Property(RelationId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MessageTriple {
    pub s: EntityId,
    pub r: TripleRelation,
    pub o: EntityId,
}

/// Where a tokenized name came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NameSource {
    Primary,
    Shortened,
    AncestorAppended,
    NumberStripped,
    BracketPart,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenizedName {
    pub tokens: Vec<String>,
    pub source: NameSource,
}

impl TokenizedName {
    pub fn new(tokens: Vec<String>, source: NameSource) -> Self {
        Self { tokens, source }
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }

    /// Lowercased tokens, used for case-insensitive comparisons.
    pub fn key(&self) -> Vec<String> {
        self.tokens.iter().map(|t| t.to_lowercase()).collect()
    }
}

impl fmt::Display for TokenizedName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Lower,
    Upper,
    Digit,
    Other,
}

fn char_class(c: char) -> CharClass {
    if c.is_ascii_digit() {
        CharClass::Digit
    } else if c.is_uppercase() {
        CharClass::Upper
    } else if c.is_alphabetic() {
        CharClass::Lower
    } else {
        CharClass::Other
    }
}

fn split_camel(chunk: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c == '(' || c == ')' {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            out.push(c.to_string());
            continue;
        }
        if let Some(&prev) = current.chars().last().as_ref() {
            let (p, k) = (char_class(prev), char_class(c));
            let boundary = match (p, k) {
                (CharClass::Lower, CharClass::Upper) => true,
                (CharClass::Digit, CharClass::Upper | CharClass::Lower) => true,
                (CharClass::Upper | CharClass::Lower, CharClass::Digit) => true,
                // "XMLFile": split before the last capital of a capital run
                (CharClass::Upper, CharClass::Upper) => chars
                    .get(i + 1)
                    .is_some_and(|n| char_class(*n) == CharClass::Lower),
                _ => false,
            };
            if boundary {
                out.push(std::mem::take(&mut current));
            }
        }
        current.push(c);
    }
    if !current.is_empty() {
        out.push(current);
    }
}

/// Splits free text on whitespace, underscores and hyphens, then CamelCase and
/// letter/digit boundaries. Brackets become tokens of their own.
pub fn split_name_text(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split(|c: char| c.is_whitespace() || c == '_' || c == '-') {
        if !chunk.is_empty() {
            split_camel(chunk, &mut tokens);
        }
    }
    tokens
}

/// Tokenizes an identifier. A label, when present, is used instead of the
/// identifier; labels are split on whitespace, underscores and hyphens only.
pub fn tokenize_identifier(id: &Identifier) -> TokenizedName {
    let tokens = match &id.label {
        Some(label) => {
            let mut tokens = Vec::new();
            for chunk in label.split(|c: char| c.is_whitespace() || c == '_' || c == '-') {
                let mut word = String::new();
                for c in chunk.chars() {
                    if c == '(' || c == ')' {
                        if !word.is_empty() {
                            tokens.push(std::mem::take(&mut word));
                        }
                        tokens.push(c.to_string());
                    } else {
                        word.push(c);
                    }
                }
                if !word.is_empty() {
                    tokens.push(word);
                }
            }
            tokens
        }
        None => {
            let local = id
                .raw
                .rsplit([':', '#'])
                .next()
                .unwrap_or(&id.raw);
            split_name_text(local)
        }
    };
    TokenizedName::new(tokens, NameSource::Primary)
}

#[derive(Debug, Clone, Default)]
pub struct Ontology {
    entities: Vec<Entity>,
    relations: Vec<Relation>,
    facts: Vec<MessageTriple>,
    entity_index: HashMap<String, EntityId>,
    relation_index: HashMap<String, RelationId>,
    /// Number of input statements mentioning each identifier.
    mentions: BTreeMap<String, usize>,
}

fn parse_label(rest: &[&str], line_text: &str, line: usize) -> Result<Option<String>, OntologyError> {
    if rest.is_empty() {
        return Ok(None);
    }
    if rest[0] != "label" {
        return Err(OntologyError::Parse {
            line,
            message: format!("unexpected token {:?}", rest[0]),
        });
    }
    let start = line_text.find('"');
    let end = line_text.rfind('"');
    match (start, end) {
        (Some(s), Some(e)) if e > s => Ok(Some(line_text[s + 1..e].to_string())),
        _ => Err(OntologyError::Parse {
            line,
            message: "label must be a double-quoted string".into(),
        }),
    }
}

impl Ontology {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, OntologyError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| OntologyError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, OntologyError> {
        let mut onto = Ontology::default();
        // Deferred statements are resolved once all declarations are known.
        let mut deferred: Vec<(usize, Vec<String>)> = Vec::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw_line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let words: Vec<&str> = trimmed.split_whitespace().collect();
            match words[0] {
                "class" | "individual" => {
                    let id = words.get(1).ok_or_else(|| OntologyError::Parse {
                        line,
                        message: format!("{} needs an identifier", words[0]),
                    })?;
                    let label = parse_label(&words[2..], trimmed, line)?;
                    if onto.entity_index.contains_key(*id) {
                        return Err(OntologyError::Duplicate {
                            line,
                            id: id.to_string(),
                        });
                    }
                    let kind = if words[0] == "class" {
                        EntityKind::Class
                    } else {
                        EntityKind::Individual
                    };
                    let eid = EntityId(onto.entities.len());
                    onto.entities.push(Entity {
                        id: Identifier {
                            raw: id.to_string(),
                            label,
                        },
                        kind,
                        parents: Vec::new(),
                        equivalents: Vec::new(),
                    });
                    onto.entity_index.insert(id.to_string(), eid);
                    *onto.mentions.entry(id.to_string()).or_default() += 1;
                }
                "subclass" | "equivalent" | "instance" => {
                    if words.len() != 3 {
                        return Err(OntologyError::Parse {
                            line,
                            message: format!("{} takes two identifiers", words[0]),
                        });
                    }
                    deferred.push((line, words.iter().map(|w| w.to_string()).collect()));
                }
                "fact" => {
                    if words.len() != 4 {
                        return Err(OntologyError::Parse {
                            line,
                            message: "fact takes subject, relation and object".into(),
                        });
                    }
                    deferred.push((line, words.iter().map(|w| w.to_string()).collect()));
                }
                other => {
                    return Err(OntologyError::Parse {
                        line,
                        message: format!("unknown statement {other:?}"),
                    })
                }
            }
        }
        if onto.entities.is_empty() {
            return Err(OntologyError::Empty);
        }
        for (line, words) in deferred {
            let resolve = |onto: &Ontology, id: &str| {
                onto.entity_index
                    .get(id)
                    .copied()
                    .ok_or_else(|| OntologyError::Dangling {
                        line,
                        id: id.to_string(),
                    })
            };
            match words[0].as_str() {
                "subclass" | "instance" => {
                    let child = resolve(&onto, &words[1])?;
                    let parent = resolve(&onto, &words[2])?;
                    let expected_child = if words[0] == "subclass" {
                        EntityKind::Class
                    } else {
                        EntityKind::Individual
                    };
                    if onto.entities[child.0].kind != expected_child
                        || onto.entities[parent.0].kind != EntityKind::Class
                    {
                        return Err(OntologyError::Parse {
                            line,
                            message: format!("{} has the wrong entity kinds", words[0]),
                        });
                    }
                    if !onto.entities[child.0].parents.contains(&parent) {
                        onto.entities[child.0].parents.push(parent);
                    }
                }
                "equivalent" => {
                    let a = resolve(&onto, &words[1])?;
                    let b = resolve(&onto, &words[2])?;
                    if onto.entities[a.0].kind != EntityKind::Class
                        || onto.entities[b.0].kind != EntityKind::Class
                    {
                        return Err(OntologyError::Parse {
                            line,
                            message: "equivalent relates two classes".into(),
                        });
                    }
                    if a != b {
                        if !onto.entities[a.0].equivalents.contains(&b) {
                            onto.entities[a.0].equivalents.push(b);
                        }
                        if !onto.entities[b.0].equivalents.contains(&a) {
                            onto.entities[b.0].equivalents.push(a);
                        }
                    }
                }
                _ => {
                    let s = resolve(&onto, &words[1])?;
                    let o = resolve(&onto, &words[3])?;
                    let r = match onto.relation_index.get(&words[2]) {
                        Some(r) => *r,
                        None => {
                            let r = RelationId(onto.relations.len());
                            onto.relations.push(Relation {
                                id: Identifier::new(words[2].clone()),
                            });
                            onto.relation_index.insert(words[2].clone(), r);
                            r
                        }
                    };
                    let triple = MessageTriple {
                        s,
                        r: TripleRelation::Property(r),
                        o,
                    };
                    if !onto.facts.contains(&triple) {
                        onto.facts.push(triple);
                    }
                }
            }
            for w in &words[1..] {
                *onto.mentions.entry(w.clone()).or_default() += 1;
            }
        }
        onto.check_acyclic()?;
        Ok(onto)
    }

    fn check_acyclic(&self) -> Result<(), OntologyError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.entities.len()];
        for start in 0..self.entities.len() {
            if state[start] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            state[start] = 1;
            while let Some((node, next)) = stack.pop() {
                let parents = &self.entities[node].parents;
                if next < parents.len() {
                    stack.push((node, next + 1));
                    let p = parents[next].0;
                    match state[p] {
                        0 => {
                            state[p] = 1;
                            stack.push((p, 0));
                        }
                        1 => return Err(OntologyError::Cycle(self.entities[p].id.raw.clone())),
                        _ => {}
                    }
                } else {
                    state[node] = 2;
                }
            }
        }
        Ok(())
    }

    pub fn entities(&self) -> impl Iterator<Item = (EntityId, &Entity)> {
        self.entities.iter().enumerate().map(|(i, e)| (EntityId(i), e))
    }

    pub fn relations(&self) -> impl Iterator<Item = (RelationId, &Relation)> {
        self.relations.iter().enumerate().map(|(i, r)| (RelationId(i), r))
    }

    pub fn entity(&self, id: EntityId) -> &Entity {
        &self.entities[id.0]
    }

    pub fn relation(&self, id: RelationId) -> &Relation {
        &self.relations[id.0]
    }

    pub fn entity_id(&self, raw: &str) -> Option<EntityId> {
        self.entity_index.get(raw).copied()
    }

    pub fn relation_id(&self, raw: &str) -> Option<RelationId> {
        self.relation_index.get(raw).copied()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    /// Number of statements of the input that mention `raw`.
    pub fn mention_count(&self, raw: &str) -> usize {
        self.mentions.get(raw).copied().unwrap_or(0)
    }

    pub fn facts(&self) -> &[MessageTriple] {
        &self.facts
    }

    pub fn facts_of(&self, r: RelationId) -> impl Iterator<Item = &MessageTriple> {
        self.facts
            .iter()
            .filter(move |t| t.r == TripleRelation::Property(r))
    }

    pub fn tok_name(&self, id: EntityId) -> TokenizedName {
        tokenize_identifier(&self.entity(id).id)
    }

    /// All message triples whose subject is `t`: one isA/instanceOf triple per
    /// parent, then the property facts in input order.
    pub fn triples_about(&self, t: EntityId) -> Vec<MessageTriple> {
        let entity = self.entity(t);
        let builtin = match entity.kind {
            EntityKind::Class => TripleRelation::IsA,
            EntityKind::Individual => TripleRelation::InstanceOf,
        };
        entity
            .parents
            .iter()
            .map(|&p| MessageTriple { s: t, r: builtin, o: p })
            .chain(self.facts.iter().filter(|f| f.s == t).copied())
            .collect()
    }

    /// Ancestor classes of `t`, breadth first, without duplicates. Equivalent
    /// classes of `t` contribute their parents (one level of equivalence);
    /// from there the closure follows parent links only.
    pub fn ancestors_of(&self, t: EntityId) -> Vec<EntityId> {
        let entity = self.entity(t);
        let mut seen: HashSet<EntityId> = HashSet::new();
        seen.insert(t);
        let mut excluded: HashSet<EntityId> = entity.equivalents.iter().copied().collect();
        excluded.insert(t);
        let mut queue: VecDeque<EntityId> = VecDeque::new();
        let mut out = Vec::new();
        let starts = entity
            .parents
            .iter()
            .chain(entity.equivalents.iter().flat_map(|e| self.entity(*e).parents.iter()));
        for &p in starts {
            if seen.insert(p) {
                queue.push_back(p);
            }
        }
        while let Some(a) = queue.pop_front() {
            if !excluded.contains(&a) {
                out.push(a);
            }
            for &p in &self.entity(a).parents {
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        out
    }

    /// Display form of a triple relation.
    pub fn relation_name(&self, r: TripleRelation) -> String {
        match r {
            TripleRelation::IsA => "isA".into(),
            TripleRelation::InstanceOf => "instanceOf".into(),
            TripleRelation::Property(id) => self.relation(id).id.raw.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(raw: &str) -> Vec<String> {
        tokenize_identifier(&Identifier::new(raw)).tokens
    }

    #[test]
    fn splits_camel_case() {
        assert_eq!(toks(":KalinCellarsSemillon"), ["Kalin", "Cellars", "Semillon"]);
    }

    #[test]
    fn digit_runs_are_tokens() {
        assert_eq!(toks(":exhibit23"), ["exhibit", "23"]);
        assert_eq!(toks(":Semillon2006"), ["Semillon", "2006"]);
    }

    #[test]
    fn splits_underscores_and_hyphens() {
        assert_eq!(toks(":has_symptom"), ["has", "symptom"]);
        assert_eq!(toks(":national-arch-napoli"), ["national", "arch", "napoli"]);
    }

    #[test]
    fn splits_acronym_runs() {
        assert_eq!(toks(":XMLFile"), ["XML", "File"]);
        assert_eq!(toks("wine:CotesDOr"), ["Cotes", "D", "Or"]);
    }

    #[test]
    fn label_overrides_identifier() {
        let id = Identifier::with_label(":Gerbil", "gerbil (dessert rat)");
        assert_eq!(
            tokenize_identifier(&id).tokens,
            ["gerbil", "(", "dessert", "rat", ")"]
        );
    }

    #[test]
    fn empty_file_has_no_entities() {
        assert!(matches!(Ontology::parse("# nothing\n").unwrap_err(), OntologyError::Empty));
    }

    #[test]
    fn detects_cycles() {
        let err = Ontology::parse("class :A\nclass :B\nsubclass :A :B\nsubclass :B :A\n").unwrap_err();
        assert!(matches!(err, OntologyError::Cycle(_)));
    }

    #[test]
    fn dangling_reference_reports_line() {
        let err = Ontology::parse("class :A\nsubclass :A :Missing\n").unwrap_err();
        assert!(matches!(err, OntologyError::Dangling { line: 2, ref id } if id == ":Missing"));
    }

    #[test]
    fn parse_error_reports_line() {
        let err = Ontology::parse("class :A\nfoo :A\n").unwrap_err();
        assert!(matches!(err, OntologyError::Parse { line: 2, .. }));
    }

    #[test]
    fn diamond_ancestors_listed_once() {
        let onto = Ontology::parse(
            "class :Top\nclass :L\nclass :R\nclass :Bottom\n\
             subclass :L :Top\nsubclass :R :Top\nsubclass :Bottom :L\nsubclass :Bottom :R\n",
        )
        .unwrap();
        let b = onto.entity_id(":Bottom").unwrap();
        let names: Vec<_> = onto
            .ancestors_of(b)
            .into_iter()
            .map(|a| onto.entity(a).id.raw.clone())
            .collect();
        assert_eq!(names, [":L", ":R", ":Top"]);
    }

    #[test]
    fn equivalent_class_parents_are_ancestors() {
        let onto = Ontology::parse(
            "class :A\nclass :B\nclass :P\nclass :Q\n\
             equivalent :A :B\nsubclass :B :P\nsubclass :P :Q\n",
        )
        .unwrap();
        let a = onto.entity_id(":A").unwrap();
        let names: Vec<_> = onto
            .ancestors_of(a)
            .into_iter()
            .map(|x| onto.entity(x).id.raw.clone())
            .collect();
        assert_eq!(names, [":P", ":Q"]);
    }

    #[test]
    fn entity_without_facts_has_no_triples() {
        let onto = Ontology::parse("class :Lonely\n").unwrap();
        assert!(onto.triples_about(EntityId(0)).is_empty());
    }
}
