//! Slot models for natural-language names and sentence plans, with a
//! round-trippable text notation.
//!
//! A slot is written `[text]{annotation,annotation,...}`. Agreement indices
//! are 1-based in the notation and 0-based in memory. Examples:
//!
//! ```text
//! []{article,indef,agr=3} [red]{adj} [wine]{noun,head,sing,neut}
//! [ref(S)]{nom} [make]{verb,passive,present,agr=1,polarity=+} [from]{prep} [ref(O)]{acc}
//! ```
//!
//! Inside the brackets `\`, `[` and `]` are escaped with a backslash.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlotError {
    #[error("notation error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("invalid slot {index}: {message}")]
    Invalid { index: usize, message: String },
    #[error("{0}")]
    Structure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Number {
    Singular,
    Plural,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gender {
    Masculine,
    Feminine,
    Neuter,
    /// Person whose gender is unknown ("he/she").
    Person,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Definiteness {
    Definite,
    Indefinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Case {
    Nominative,
    Accusative,
    Possessive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Voice {
    Active,
    Passive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tense {
    Present,
    Past,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    Positive,
    Negative,
}

/// Shape of the verb group a verb slot produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VerbForm {
    /// Tensed verb group ("makes", "is made", "did not make").
    Finite,
    /// be + present participle ("is making").
    Progressive,
    /// Bare past participle without auxiliary ("made").
    PastParticiple,
    /// Bare present participle without auxiliary ("making").
    PresentParticiple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    S,
    O,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NameSlot {
    Article {
        definiteness: Definiteness,
        agr: Option<usize>,
    },
    Noun {
        lemma: String,
        head: bool,
        number: Number,
        gender: Gender,
        capitalized: bool,
    },
    /// Number and gender are meaningful only for a head adjective.
    Adjective {
        lemma: String,
        head: bool,
        number: Number,
        gender: Gender,
        capitalized: bool,
    },
    Preposition {
        form: String,
    },
    FixedString {
        text: String,
    },
}

impl NameSlot {
    pub fn adjective(lemma: impl Into<String>) -> Self {
        NameSlot::Adjective {
            lemma: lemma.into(),
            head: false,
            number: Number::Singular,
            gender: Gender::Neuter,
            capitalized: false,
        }
    }

    pub fn is_head(&self) -> bool {
        matches!(
            self,
            NameSlot::Noun { head: true, .. } | NameSlot::Adjective { head: true, .. }
        )
    }

    pub fn is_article(&self) -> bool {
        matches!(self, NameSlot::Article { .. })
    }

    /// The word this slot holds, before inflection.
    pub fn word(&self) -> Option<&str> {
        match self {
            NameSlot::Article { .. } => None,
            NameSlot::Noun { lemma, .. } | NameSlot::Adjective { lemma, .. } => Some(lemma),
            NameSlot::Preposition { form } => Some(form),
            NameSlot::FixedString { text } => Some(text),
        }
    }
}

/// Natural-language name of an entity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NLName {
    pub slots: Vec<NameSlot>,
}

impl NLName {
    pub fn new(slots: Vec<NameSlot>) -> Self {
        Self { slots }
    }

    pub fn head_index(&self) -> Option<usize> {
        self.slots.iter().position(NameSlot::is_head)
    }

    pub fn head(&self) -> Option<&NameSlot> {
        self.head_index().map(|i| &self.slots[i])
    }

    /// Checks the structural rules: one head, valid agreement targets.
    pub fn validate(&self) -> Result<(), SlotError> {
        let heads = self.slots.iter().filter(|s| s.is_head()).count();
        if heads != 1 {
            return Err(SlotError::Structure(format!(
                "a name needs exactly one head slot, found {heads}"
            )));
        }
        for (i, slot) in self.slots.iter().enumerate() {
            if let NameSlot::Article { agr: Some(a), .. } = slot {
                if !matches!(self.slots.get(*a), Some(NameSlot::Noun { .. } | NameSlot::Adjective { .. })) {
                    return Err(SlotError::Invalid {
                        index: i,
                        message: format!("agreement target {} is not a noun", a + 1),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PlanSlot {
    Ref {
        role: Role,
        case: Case,
        no_article: bool,
    },
    Verb {
        lemma: String,
        voice: Voice,
        tense: Tense,
        polarity: Polarity,
        form: VerbForm,
        agr: Option<usize>,
    },
    Noun {
        lemma: String,
        number: Number,
        capitalized: bool,
    },
    Adjective {
        lemma: String,
    },
    Preposition {
        form: String,
    },
    FixedString {
        text: String,
    },
}

impl PlanSlot {
    pub fn reference(role: Role, case: Case) -> Self {
        PlanSlot::Ref {
            role,
            case,
            no_article: false,
        }
    }

    pub fn is_verb(&self) -> bool {
        matches!(self, PlanSlot::Verb { .. })
    }

    pub fn role(&self) -> Option<Role> {
        match self {
            PlanSlot::Ref { role, .. } => Some(*role),
            _ => None,
        }
    }
}

/// Sentence plan of a relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SentencePlan {
    pub slots: Vec<PlanSlot>,
}

impl SentencePlan {
    pub fn new(slots: Vec<PlanSlot>) -> Self {
        Self { slots }
    }

    pub fn ref_index(&self, role: Role) -> Option<usize> {
        self.slots.iter().position(|s| s.role() == Some(role))
    }

    pub fn verb_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_verb()).count()
    }

    /// Exactly one reference slot per role and valid agreement targets.
    pub fn validate(&self) -> Result<(), SlotError> {
        for role in [Role::S, Role::O] {
            let n = self.slots.iter().filter(|s| s.role() == Some(role)).count();
            if n != 1 {
                return Err(SlotError::Structure(format!(
                    "a plan needs exactly one ref({role:?}) slot, found {n}"
                )));
            }
        }
        for (i, slot) in self.slots.iter().enumerate() {
            if let PlanSlot::Verb { agr: Some(a), .. } = slot {
                if !matches!(self.slots.get(*a), Some(PlanSlot::Ref { .. } | PlanSlot::Noun { .. })) {
                    return Err(SlotError::Invalid {
                        index: i,
                        message: format!("agreement target {} is not a reference or noun", a + 1),
                    });
                }
            }
        }
        Ok(())
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if matches!(c, '\\' | '[' | ']') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

fn write_slot(f: &mut fmt::Formatter<'_>, text: &str, annotations: &[String]) -> fmt::Result {
    write!(f, "[{}]{{{}}}", escape(text), annotations.join(","))
}

fn number_tag(n: Number) -> &'static str {
    match n {
        Number::Singular => "sing",
        Number::Plural => "plur",
    }
}

fn gender_tag(g: Gender) -> &'static str {
    match g {
        Gender::Masculine => "masc",
        Gender::Feminine => "fem",
        Gender::Neuter => "neut",
        Gender::Person => "person",
    }
}

fn case_tag(c: Case) -> &'static str {
    match c {
        Case::Nominative => "nom",
        Case::Accusative => "acc",
        Case::Possessive => "poss",
    }
}

impl fmt::Display for NameSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut ann: Vec<String> = Vec::new();
        match self {
            NameSlot::Article { definiteness, agr } => {
                ann.push("article".into());
                ann.push(match definiteness {
                    Definiteness::Definite => "def".into(),
                    Definiteness::Indefinite => "indef".into(),
                });
                if let Some(a) = agr {
                    ann.push(format!("agr={}", a + 1));
                }
                write_slot(f, "", &ann)
            }
            NameSlot::Noun {
                lemma,
                head,
                number,
                gender,
                capitalized,
            } => {
                ann.push("noun".into());
                if *head {
                    ann.push("head".into());
                }
                ann.push(number_tag(*number).into());
                ann.push(gender_tag(*gender).into());
                if *capitalized {
                    ann.push("cap".into());
                }
                write_slot(f, lemma, &ann)
            }
            NameSlot::Adjective {
                lemma,
                head,
                number,
                gender,
                capitalized,
            } => {
                ann.push("adj".into());
                if *head {
                    ann.push("head".into());
                    ann.push(number_tag(*number).into());
                    ann.push(gender_tag(*gender).into());
                }
                if *capitalized {
                    ann.push("cap".into());
                }
                write_slot(f, lemma, &ann)
            }
            NameSlot::Preposition { form } => write_slot(f, form, &["prep".into()]),
            NameSlot::FixedString { text } => write_slot(f, text, &["string".into()]),
        }
    }
}

impl fmt::Display for PlanSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanSlot::Ref {
                role,
                case,
                no_article,
            } => {
                let text = match role {
                    Role::S => "ref(S)",
                    Role::O => "ref(O)",
                };
                let mut ann = vec![case_tag(*case).to_string()];
                if *no_article {
                    ann.push("noarticle".into());
                }
                write_slot(f, text, &ann)
            }
            PlanSlot::Verb {
                lemma,
                voice,
                tense,
                polarity,
                form,
                agr,
            } => {
                let mut ann = vec![
                    "verb".to_string(),
                    match voice {
                        Voice::Active => "active".into(),
                        Voice::Passive => "passive".into(),
                    },
                    match tense {
                        Tense::Present => "present".into(),
                        Tense::Past => "past".into(),
                    },
                ];
                match form {
                    VerbForm::Finite => {}
                    VerbForm::Progressive => ann.push("progressive".into()),
                    VerbForm::PastParticiple => ann.push("pastpart".into()),
                    VerbForm::PresentParticiple => ann.push("prespart".into()),
                }
                if let Some(a) = agr {
                    ann.push(format!("agr={}", a + 1));
                }
                ann.push(match polarity {
                    Polarity::Positive => "polarity=+".into(),
                    Polarity::Negative => "polarity=-".into(),
                });
                write_slot(f, lemma, &ann)
            }
            PlanSlot::Noun {
                lemma,
                number,
                capitalized,
            } => {
                let mut ann = vec!["noun".to_string(), number_tag(*number).to_string()];
                if *capitalized {
                    ann.push("cap".into());
                }
                write_slot(f, lemma, &ann)
            }
            PlanSlot::Adjective { lemma } => write_slot(f, lemma, &["adj".into()]),
            PlanSlot::Preposition { form } => write_slot(f, form, &["prep".into()]),
            PlanSlot::FixedString { text } => write_slot(f, text, &["string".into()]),
        }
    }
}

fn join_slots<T: fmt::Display>(f: &mut fmt::Formatter<'_>, slots: &[T]) -> fmt::Result {
    for (i, s) in slots.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{s}")?;
    }
    Ok(())
}

impl fmt::Display for NLName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join_slots(f, &self.slots)
    }
}

impl fmt::Display for SentencePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        join_slots(f, &self.slots)
    }
}

/// One `[text]{annotations}` item before interpretation.
struct RawSlot {
    offset: usize,
    text: String,
    annotations: Vec<String>,
}

fn syntax(offset: usize, message: impl Into<String>) -> SlotError {
    SlotError::Syntax {
        offset,
        message: message.into(),
    }
}

fn scan(input: &str) -> Result<Vec<RawSlot>, SlotError> {
    let mut slots = Vec::new();
    let mut chars = input.char_indices().peekable();
    loop {
        while chars.peek().is_some_and(|(_, c)| c.is_whitespace()) {
            chars.next();
        }
        let Some((offset, c)) = chars.next() else {
            break;
        };
        if c != '[' {
            return Err(syntax(offset, format!("expected '[' but found {c:?}")));
        }
        let mut text = String::new();
        loop {
            match chars.next() {
                Some((_, '\\')) => match chars.next() {
                    Some((_, e)) => text.push(e),
                    None => return Err(syntax(input.len(), "dangling escape")),
                },
                Some((_, ']')) => break,
                Some((_, ch)) => text.push(ch),
                None => return Err(syntax(input.len(), "unterminated slot text")),
            }
        }
        match chars.next() {
            Some((_, '{')) => {}
            Some((o, ch)) => return Err(syntax(o, format!("expected '{{' but found {ch:?}"))),
            None => return Err(syntax(input.len(), "missing annotations")),
        }
        let mut body = String::new();
        loop {
            match chars.next() {
                Some((_, '}')) => break,
                Some((_, ch)) => body.push(ch),
                None => return Err(syntax(input.len(), "unterminated annotations")),
            }
        }
        let annotations: Vec<String> = body
            .split(',')
            .map(|a| a.trim().to_string())
            .filter(|a| !a.is_empty())
            .collect();
        if annotations.is_empty() {
            return Err(syntax(offset, "slot without annotations"));
        }
        slots.push(RawSlot {
            offset,
            text,
            annotations,
        });
    }
    Ok(slots)
}

#[derive(Default)]
struct Flags {
    head: bool,
    cap: bool,
    no_article: bool,
    number: Option<Number>,
    gender: Option<Gender>,
    case: Option<Case>,
    definiteness: Option<Definiteness>,
    voice: Option<Voice>,
    tense: Option<Tense>,
    polarity: Option<Polarity>,
    form: Option<VerbForm>,
    agr: Option<usize>,
}

/// Reads every annotation after the first, which names the slot kind.
fn read_flags(raw: &RawSlot) -> Result<Flags, SlotError> {
    let mut f = Flags::default();
    for a in &raw.annotations[1..] {
        match a.as_str() {
            "head" => f.head = true,
            "cap" => f.cap = true,
            "noarticle" => f.no_article = true,
            "sing" => f.number = Some(Number::Singular),
            "plur" => f.number = Some(Number::Plural),
            "masc" => f.gender = Some(Gender::Masculine),
            "fem" => f.gender = Some(Gender::Feminine),
            "neut" => f.gender = Some(Gender::Neuter),
            "person" => f.gender = Some(Gender::Person),
            "nom" => f.case = Some(Case::Nominative),
            "acc" => f.case = Some(Case::Accusative),
            "poss" => f.case = Some(Case::Possessive),
            "def" => f.definiteness = Some(Definiteness::Definite),
            "indef" => f.definiteness = Some(Definiteness::Indefinite),
            "active" => f.voice = Some(Voice::Active),
            "passive" => f.voice = Some(Voice::Passive),
            "present" => f.tense = Some(Tense::Present),
            "past" => f.tense = Some(Tense::Past),
            "progressive" => f.form = Some(VerbForm::Progressive),
            "pastpart" => f.form = Some(VerbForm::PastParticiple),
            "prespart" => f.form = Some(VerbForm::PresentParticiple),
            "polarity=+" => f.polarity = Some(Polarity::Positive),
            "polarity=-" => f.polarity = Some(Polarity::Negative),
            other => {
                let index = other
                    .strip_prefix("agr=")
                    .and_then(|v| v.parse::<usize>().ok())
                    .filter(|v| *v >= 1)
                    .ok_or_else(|| syntax(raw.offset, format!("unknown annotation {other:?}")))?;
                f.agr = Some(index - 1);
            }
        }
    }
    Ok(f)
}

fn name_slot(raw: &RawSlot) -> Result<NameSlot, SlotError> {
    let kind = raw.annotations[0].as_str();
    let f = read_flags(raw)?;
    let need_text = || {
        if raw.text.is_empty() {
            Err(syntax(raw.offset, format!("{kind} slot needs text")))
        } else {
            Ok(raw.text.clone())
        }
    };
    Ok(match kind {
        "article" => NameSlot::Article {
            definiteness: f
                .definiteness
                .ok_or_else(|| syntax(raw.offset, "article needs def or indef"))?,
            agr: f.agr,
        },
        "noun" => NameSlot::Noun {
            lemma: need_text()?,
            head: f.head,
            number: f.number.unwrap_or(Number::Singular),
            gender: f.gender.unwrap_or(Gender::Neuter),
            capitalized: f.cap,
        },
        "adj" => NameSlot::Adjective {
            lemma: need_text()?,
            head: f.head,
            number: f.number.unwrap_or(Number::Singular),
            gender: f.gender.unwrap_or(Gender::Neuter),
            capitalized: f.cap,
        },
        "prep" => NameSlot::Preposition { form: need_text()? },
        "string" => NameSlot::FixedString { text: need_text()? },
        other => return Err(syntax(raw.offset, format!("unknown name slot kind {other:?}"))),
    })
}

fn plan_slot(raw: &RawSlot) -> Result<PlanSlot, SlotError> {
    let role = match raw.text.as_str() {
        "ref(S)" => Some(Role::S),
        "ref(O)" => Some(Role::O),
        _ => None,
    };
    if let Some(role) = role {
        let mut with_kind = vec![String::new()];
        with_kind.extend(raw.annotations.iter().cloned());
        let f = read_flags(&RawSlot {
            offset: raw.offset,
            text: raw.text.clone(),
            annotations: with_kind,
        })?;
        return Ok(PlanSlot::Ref {
            role,
            case: f.case.unwrap_or(Case::Nominative),
            no_article: f.no_article,
        });
    }
    let kind = raw.annotations[0].as_str();
    let f = read_flags(raw)?;
    if raw.text.is_empty() {
        return Err(syntax(raw.offset, format!("{kind} slot needs text")));
    }
    let text = raw.text.clone();
    Ok(match kind {
        "verb" => PlanSlot::Verb {
            lemma: text,
            voice: f.voice.unwrap_or(Voice::Active),
            tense: f.tense.unwrap_or(Tense::Present),
            polarity: f.polarity.unwrap_or(Polarity::Positive),
            form: f.form.unwrap_or(VerbForm::Finite),
            agr: f.agr,
        },
        "noun" => PlanSlot::Noun {
            lemma: text,
            number: f.number.unwrap_or(Number::Singular),
            capitalized: f.cap,
        },
        "adj" => PlanSlot::Adjective { lemma: text },
        "prep" => PlanSlot::Preposition { form: text },
        "string" => PlanSlot::FixedString { text },
        other => return Err(syntax(raw.offset, format!("unknown plan slot kind {other:?}"))),
    })
}

impl FromStr for NLName {
    type Err = SlotError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let slots = scan(s)?.iter().map(name_slot).collect::<Result<Vec<_>, _>>()?;
        let name = NLName { slots };
        name.validate()?;
        Ok(name)
    }
}

impl FromStr for SentencePlan {
    type Err = SlotError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let slots = scan(s)?.iter().map(plan_slot).collect::<Result<Vec<_>, _>>()?;
        let plan = SentencePlan { slots };
        plan.validate()?;
        Ok(plan)
    }
}

impl TryFrom<String> for NLName {
    type Error = SlotError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<NLName> for String {
    fn from(value: NLName) -> Self {
        value.to_string()
    }
}

impl TryFrom<String> for SentencePlan {
    type Error = SlotError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<SentencePlan> for String {
    fn from(value: SentencePlan) -> Self {
        value.to_string()
    }
}
