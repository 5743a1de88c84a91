//! A small English realizer: noun and verb inflection, article choice, and
//! rendering of names and sentence plans into text.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::OnceLock;

use crate::slots::{
    Case, Definiteness, Gender, NLName, NameSlot, Number, PlanSlot, Polarity, Role, SentencePlan,
    Tense, VerbForm, Voice,
};
use crate::text::{capitalize, word_list};

/// Editable word lists backing inflection, article choice and gender.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    plurals: HashMap<String, String>,
    singulars: HashMap<String, String>,
    verbs: HashMap<String, (String, String)>,
    verb_lemmas: HashMap<String, String>,
    mass_nouns: HashSet<String>,
    persons: HashMap<String, Gender>,
    locations: HashSet<String>,
    genders: HashMap<String, Gender>,
    an_exceptions: HashMap<String, bool>,
    determiners: HashSet<String>,
    negations: HashSet<String>,
    ignore_words: HashSet<String>,
}

const FILES: [(&str, &str); 10] = [
    ("irregular_nouns.txt", include_str!("../data/irregular_nouns.txt")),
    ("irregular_verbs.txt", include_str!("../data/irregular_verbs.txt")),
    ("mass_nouns.txt", include_str!("../data/mass_nouns.txt")),
    ("persons.txt", include_str!("../data/persons.txt")),
    ("locations.txt", include_str!("../data/locations.txt")),
    ("gender_lexicon.txt", include_str!("../data/gender_lexicon.txt")),
    ("an_exceptions.txt", include_str!("../data/an_exceptions.txt")),
    ("determiners.txt", include_str!("../data/determiners.txt")),
    ("negations.txt", include_str!("../data/negations.txt")),
    ("ignore_words.txt", include_str!("../data/ignore_words.txt")),
];

fn parse_gender(s: &str) -> Option<Gender> {
    Some(match s {
        "masc" => Gender::Masculine,
        "fem" => Gender::Feminine,
        "neut" => Gender::Neuter,
        "person" => Gender::Person,
        _ => return None,
    })
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// True for words ending consonant-vowel-consonant with a single vowel group,
/// whose final consonant doubles before -ed/-ing ("stop" -> "stopped").
fn doubles_final_consonant(word: &str) -> bool {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    if n < 3 {
        return false;
    }
    let (a, b, c) = (chars[n - 3], chars[n - 2], chars[n - 1]);
    let vowel_groups = chars
        .iter()
        .enumerate()
        .filter(|(i, ch)| is_vowel(**ch) && (*i == 0 || !is_vowel(chars[i - 1])))
        .count();
    !is_vowel(a) && is_vowel(b) && !is_vowel(c) && !matches!(c, 'w' | 'x' | 'y') && vowel_groups == 1
}

impl Lexicon {
    /// The lexicon shipped with the crate.
    pub fn builtin() -> Self {
        let mut lex = Lexicon::default();
        for (name, text) in FILES {
            lex.load_list(name, text);
        }
        lex
    }

    /// Shared instance of [`Lexicon::builtin`].
    pub fn shared() -> &'static Lexicon {
        static SHARED: OnceLock<Lexicon> = OnceLock::new();
        SHARED.get_or_init(Lexicon::builtin)
    }

    /// Builtin lexicon with every list found in `dir` replacing its builtin
    /// counterpart.
    pub fn from_dir(dir: impl AsRef<Path>) -> std::io::Result<Self> {
        let mut lex = Lexicon::default();
        for (name, builtin) in FILES {
            let path = dir.as_ref().join(name);
            if path.exists() {
                lex.load_list(name, &std::fs::read_to_string(path)?);
            } else {
                lex.load_list(name, builtin);
            }
        }
        Ok(lex)
    }

    fn load_list(&mut self, name: &str, text: &str) {
        for line in word_list(text) {
            let fields: Vec<String> = line.split_whitespace().map(str::to_lowercase).collect();
            match (name, fields.as_slice()) {
                ("irregular_nouns.txt", [sing, plur]) => {
                    self.plurals.insert(sing.clone(), plur.clone());
                    self.singulars.insert(plur.clone(), sing.clone());
                }
                ("irregular_verbs.txt", [lemma, past, pp]) => {
                    self.verb_lemmas.insert(past.clone(), lemma.clone());
                    self.verb_lemmas.insert(pp.clone(), lemma.clone());
                    self.verbs.insert(lemma.clone(), (past.clone(), pp.clone()));
                }
                ("mass_nouns.txt", [w]) => {
                    self.mass_nouns.insert(w.clone());
                }
                ("persons.txt", [w]) => {
                    self.persons.insert(w.clone(), Gender::Person);
                }
                ("persons.txt", [w, g]) => {
                    self.persons
                        .insert(w.clone(), parse_gender(g).unwrap_or(Gender::Person));
                }
                ("locations.txt", [w]) => {
                    self.locations.insert(w.clone());
                }
                ("gender_lexicon.txt", [w, g]) => {
                    if let Some(g) = parse_gender(g) {
                        self.genders.insert(w.clone(), g);
                    }
                }
                ("an_exceptions.txt", [w, a]) => {
                    self.an_exceptions.insert(w.clone(), a == "an");
                }
                ("determiners.txt", [w]) => {
                    self.determiners.insert(w.clone());
                }
                ("negations.txt", [w]) => {
                    self.negations.insert(w.clone());
                }
                ("ignore_words.txt", [w]) => {
                    self.ignore_words.insert(w.clone());
                }
                _ => log::warn!("{name}: ignoring malformed entry {line:?}"),
            }
        }
    }

    pub fn is_mass_noun(&self, word: &str) -> bool {
        self.mass_nouns.contains(&word.to_lowercase())
    }

    pub fn is_determiner(&self, word: &str) -> bool {
        self.determiners.contains(&word.to_lowercase())
    }

    pub fn is_negation(&self, word: &str) -> bool {
        self.negations.contains(&word.to_lowercase())
    }

    /// Articles and connectives skipped during name alignment.
    pub fn is_ignored(&self, word: &str) -> bool {
        self.ignore_words.contains(&word.to_lowercase())
    }

    pub fn is_person(&self, word: &str) -> bool {
        let w = word.to_lowercase();
        self.persons.contains_key(&w) || self.genders.get(&w) == Some(&Gender::Person)
    }

    pub fn is_location(&self, word: &str) -> bool {
        self.locations.contains(&word.to_lowercase())
    }

    /// Gender of a noun: the gender lexicon first, then the person gazetteer;
    /// everything else is neuter.
    pub fn gender_of(&self, word: &str) -> Gender {
        let w = word.to_lowercase();
        if let Some(g) = self.genders.get(&w) {
            return *g;
        }
        if let Some(g) = self.persons.get(&w) {
            return *g;
        }
        Gender::Neuter
    }

    pub fn plural(&self, lemma: &str) -> String {
        let lower = lemma.to_lowercase();
        if let Some(p) = self.plurals.get(&lower) {
            return match_case(lemma, p);
        }
        if self.mass_nouns.contains(&lower) {
            return lemma.to_string();
        }
        if ["s", "x", "z", "ch", "sh"].iter().any(|e| lower.ends_with(e)) {
            return format!("{lemma}es");
        }
        if let Some(stem) = lower.strip_suffix('y') {
            if stem.chars().last().is_some_and(|c| !is_vowel(c)) {
                return format!("{}ies", &lemma[..lemma.len() - 1]);
            }
        }
        format!("{lemma}s")
    }

    /// Rule-based singular of a plural noun form.
    pub fn singular(&self, word: &str) -> String {
        let lower = word.to_lowercase();
        if let Some(s) = self.singulars.get(&lower) {
            return match_case(word, s);
        }
        if lower.len() > 3 {
            if lower.ends_with("ies") {
                return format!("{}y", &word[..word.len() - 3]);
            }
            if ["ses", "xes", "zes", "ches", "shes"].iter().any(|e| lower.ends_with(e)) {
                return word[..word.len() - 2].to_string();
            }
        }
        if lower.len() > 2 && lower.ends_with('s') && !lower.ends_with("ss") && !lower.ends_with("us") {
            return word[..word.len() - 1].to_string();
        }
        word.to_string()
    }

    pub fn third_person(&self, lemma: &str) -> String {
        match lemma {
            "be" => "is".into(),
            "have" => "has".into(),
            _ => {
                if ["s", "x", "z", "ch", "sh", "o"].iter().any(|e| lemma.ends_with(e)) {
                    format!("{lemma}es")
                } else if lemma.ends_with('y') && lemma.len() > 1 && !is_vowel(lemma.chars().rev().nth(1).unwrap_or('a')) {
                    format!("{}ies", &lemma[..lemma.len() - 1])
                } else {
                    format!("{lemma}s")
                }
            }
        }
    }

    fn regular_ed(&self, lemma: &str) -> String {
        if lemma.ends_with('e') {
            format!("{lemma}d")
        } else if lemma.ends_with('y') && lemma.len() > 1 && !is_vowel(lemma.chars().rev().nth(1).unwrap_or('a')) {
            format!("{}ied", &lemma[..lemma.len() - 1])
        } else if doubles_final_consonant(lemma) {
            format!("{lemma}{}ed", lemma.chars().last().unwrap_or_default())
        } else {
            format!("{lemma}ed")
        }
    }

    pub fn past(&self, lemma: &str) -> String {
        match self.verbs.get(lemma) {
            Some((past, _)) => past.clone(),
            None => self.regular_ed(lemma),
        }
    }

    pub fn past_participle(&self, lemma: &str) -> String {
        match self.verbs.get(lemma) {
            Some((_, pp)) => pp.clone(),
            None => self.regular_ed(lemma),
        }
    }

    pub fn present_participle(&self, lemma: &str) -> String {
        if lemma == "be" {
            return "being".into();
        }
        if let Some(stem) = lemma.strip_suffix("ie") {
            return format!("{stem}ying");
        }
        if lemma.ends_with('e') && !lemma.ends_with("ee") && !lemma.ends_with("ye") && !lemma.ends_with("oe") && lemma.len() > 2 {
            return format!("{}ing", &lemma[..lemma.len() - 1]);
        }
        if doubles_final_consonant(lemma) {
            return format!("{lemma}{}ing", lemma.chars().last().unwrap_or_default());
        }
        format!("{lemma}ing")
    }

    /// Lemma of an inflected verb form, by lexicon lookup then suffix rules.
    pub fn verb_lemma(&self, form: &str) -> String {
        let w = form.to_lowercase();
        match w.as_str() {
            "is" | "are" | "am" | "was" | "were" | "been" | "being" | "'s" | "'re" => return "be".into(),
            "has" | "had" => return "have".into(),
            "does" | "did" => return "do".into(),
            _ => {}
        }
        if let Some(l) = self.verb_lemmas.get(&w) {
            return l.clone();
        }
        if self.verbs.contains_key(&w) {
            return w;
        }
        if let Some(stem) = w.strip_suffix("ing") {
            if stem.len() >= 2 {
                return stem.to_string();
            }
        }
        if let Some(stem) = w.strip_suffix("ied") {
            return format!("{stem}y");
        }
        if let Some(stem) = w.strip_suffix("ed") {
            if stem.len() >= 2 {
                return stem.to_string();
            }
        }
        if let Some(stem) = w.strip_suffix("ies") {
            return format!("{stem}y");
        }
        if w.len() > 2 && w.ends_with('s') && !w.ends_with("ss") {
            return w[..w.len() - 1].to_string();
        }
        w
    }

    /// "a" or "an" for the word that follows the article.
    pub fn indefinite_article(&self, next_word: &str) -> &'static str {
        let lower = next_word.to_lowercase();
        if let Some(an) = self.an_exceptions.get(&lower) {
            return if *an { "an" } else { "a" };
        }
        match lower.chars().next() {
            Some(c) if is_vowel(c) => "an",
            _ => "a",
        }
    }
}

fn match_case(template: &str, word: &str) -> String {
    if template.chars().next().is_some_and(char::is_uppercase) {
        capitalize(word)
    } else {
        word.to_string()
    }
}

pub fn inflect_noun(lex: &Lexicon, lemma: &str, number: Number) -> String {
    match number {
        Number::Singular => lemma.to_string(),
        Number::Plural => lex.plural(lemma),
    }
}

/// The verb-relevant annotations of a verb slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbSpec<'a> {
    pub lemma: &'a str,
    pub voice: Voice,
    pub tense: Tense,
    pub polarity: Polarity,
    pub form: VerbForm,
}

fn be_form(tense: Tense, number: Number) -> &'static str {
    match (tense, number) {
        (Tense::Present, Number::Singular) => "is",
        (Tense::Present, Number::Plural) => "are",
        (Tense::Past, Number::Singular) => "was",
        (Tense::Past, Number::Plural) => "were",
    }
}

/// Words of the verb group for a third-person subject of `number`.
pub fn inflect_verb(lex: &Lexicon, spec: &VerbSpec<'_>, number: Number) -> Vec<String> {
    let negative = spec.polarity == Polarity::Negative;
    let be = be_form(spec.tense, number).to_string();
    let mut out: Vec<String> = Vec::new();
    let mut with_aux = |aux: String, rest: Vec<String>| {
        out.push(aux);
        if negative {
            out.push("not".into());
        }
        out.extend(rest);
    };
    match (spec.form, spec.voice) {
        (VerbForm::Finite, Voice::Passive) => with_aux(be, vec![lex.past_participle(spec.lemma)]),
        (VerbForm::Finite, Voice::Active) if spec.lemma == "be" => with_aux(be, Vec::new()),
        (VerbForm::Finite, Voice::Active) => {
            if negative {
                let aux = match (spec.tense, number) {
                    (Tense::Past, _) => "did",
                    (Tense::Present, Number::Singular) => "does",
                    (Tense::Present, Number::Plural) => "do",
                };
                with_aux(aux.into(), vec![spec.lemma.to_string()]);
            } else {
                out.push(match (spec.tense, number) {
                    (Tense::Past, _) => lex.past(spec.lemma),
                    (Tense::Present, Number::Singular) => lex.third_person(spec.lemma),
                    (Tense::Present, Number::Plural) => spec.lemma.to_string(),
                });
            }
        }
        (VerbForm::Progressive, Voice::Active) => with_aux(be, vec![lex.present_participle(spec.lemma)]),
        (VerbForm::Progressive, Voice::Passive) => {
            with_aux(be, vec!["being".into(), lex.past_participle(spec.lemma)])
        }
        (VerbForm::PastParticiple, _) => {
            if negative {
                out.push("not".into());
            }
            out.push(lex.past_participle(spec.lemma));
        }
        (VerbForm::PresentParticiple, _) => {
            if negative {
                out.push("not".into());
            }
            out.push(lex.present_participle(spec.lemma));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArticleChoice {
    #[default]
    AsIs,
    Omit,
    Definite,
    Indefinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NameOptions {
    pub number: Option<Number>,
    pub article: ArticleChoice,
    pub pronoun: bool,
    pub case: Case,
}

impl Default for NameOptions {
    fn default() -> Self {
        Self {
            number: None,
            article: ArticleChoice::AsIs,
            pronoun: false,
            case: Case::Nominative,
        }
    }
}

fn pronoun(gender: Gender, number: Number, case: Case) -> &'static str {
    match (number, gender, case) {
        (Number::Plural, _, Case::Nominative) => "they",
        (Number::Plural, _, Case::Accusative) => "them",
        (Number::Plural, _, Case::Possessive) => "their",
        (_, Gender::Masculine, Case::Nominative) => "he",
        (_, Gender::Masculine, Case::Accusative) => "him",
        (_, Gender::Masculine, Case::Possessive) => "his",
        (_, Gender::Feminine, Case::Nominative) => "she",
        (_, Gender::Feminine, _) => "her",
        (_, Gender::Person, Case::Nominative) => "he/she",
        (_, Gender::Person, Case::Accusative) => "him/her",
        (_, Gender::Person, Case::Possessive) => "his/her",
        (_, Gender::Neuter, Case::Nominative | Case::Accusative) => "it",
        (_, Gender::Neuter, Case::Possessive) => "its",
    }
}

/// Effective number of a name under `options`.
pub fn name_number(name: &NLName, options: &NameOptions) -> Number {
    options.number.unwrap_or(match name.head() {
        Some(NameSlot::Noun { number, .. } | NameSlot::Adjective { number, .. }) => *number,
        _ => Number::Singular,
    })
}

/// Words of the phrase a name produces.
pub fn realize_nlname_tokens(lex: &Lexicon, name: &NLName, options: &NameOptions) -> Vec<String> {
    let number = name_number(name, options);
    let head = name.head_index();
    if options.pronoun {
        let gender = match name.head() {
            Some(NameSlot::Noun { gender, .. } | NameSlot::Adjective { gender, .. }) => *gender,
            _ => Gender::Neuter,
        };
        return vec![pronoun(gender, number, options.case).to_string()];
    }
    let slot_number = |i: usize| -> Number {
        if Some(i) == head {
            return number;
        }
        match &name.slots[i] {
            NameSlot::Noun { number, .. } | NameSlot::Adjective { number, .. } => *number,
            _ => Number::Singular,
        }
    };
    let has_article = name.slots.iter().any(NameSlot::is_article);
    // Words per slot, with articles left empty until their successor is known.
    let mut words: Vec<Vec<String>> = Vec::with_capacity(name.slots.len() + 1);
    let mut pending: Vec<(usize, Definiteness, Number)> = Vec::new();
    let mut insert_front: Option<Definiteness> = None;
    if !has_article {
        insert_front = match options.article {
            ArticleChoice::Definite => Some(Definiteness::Definite),
            ArticleChoice::Indefinite => Some(Definiteness::Indefinite),
            _ => None,
        };
    }
    if let Some(d) = insert_front {
        pending.push((0, d, number));
        words.push(Vec::new());
    }
    for (i, slot) in name.slots.iter().enumerate() {
        let w = match slot {
            NameSlot::Article { definiteness, agr } => {
                let main = agr.is_none_or(|a| Some(a) == head);
                let d = match (main, options.article) {
                    (true, ArticleChoice::Omit) => None,
                    (true, ArticleChoice::Definite) => Some(Definiteness::Definite),
                    (true, ArticleChoice::Indefinite) => Some(Definiteness::Indefinite),
                    _ => Some(*definiteness),
                };
                if let Some(d) = d {
                    let n = agr.map_or(number, slot_number);
                    pending.push((words.len(), d, n));
                }
                Vec::new()
            }
            NameSlot::Noun { lemma, capitalized, .. } => {
                let form = inflect_noun(lex, lemma, slot_number(i));
                vec![if *capitalized { capitalize(&form) } else { form }]
            }
            NameSlot::Adjective { lemma, capitalized, .. } => {
                vec![if *capitalized { capitalize(lemma) } else { lemma.clone() }]
            }
            NameSlot::Preposition { form } => vec![form.clone()],
            NameSlot::FixedString { text } => text.split_whitespace().map(str::to_string).collect(),
        };
        words.push(w);
    }
    for (pos, d, n) in pending {
        let article = match (d, n) {
            (Definiteness::Definite, _) => Some("the"),
            (Definiteness::Indefinite, Number::Plural) => None,
            (Definiteness::Indefinite, Number::Singular) => {
                let next = words[pos + 1..].iter().flatten().next();
                Some(lex.indefinite_article(next.map_or("", String::as_str)))
            }
        };
        if let Some(a) = article {
            words[pos] = vec![a.to_string()];
        }
    }
    let mut out: Vec<String> = words.into_iter().flatten().collect();
    if options.case == Case::Possessive {
        out.push("'s".into());
    }
    out
}

/// Joins realized words, attaching clitics to the preceding word.
pub fn join_words(words: &[String]) -> String {
    let mut out = String::new();
    for w in words {
        let attach = w == "'s" || w == "n't" || w == "," || w == "." || w == "'";
        if !out.is_empty() && !attach {
            out.push(' ');
        }
        out.push_str(w);
    }
    out
}

pub fn realize_nlname(lex: &Lexicon, name: &NLName, options: &NameOptions) -> String {
    join_words(&realize_nlname_tokens(lex, name, options))
}

/// Text standing in for a reference slot, with its grammatical number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefExpr {
    pub text: String,
    pub number: Number,
}

impl RefExpr {
    pub fn new(text: impl Into<String>, number: Number) -> Self {
        Self {
            text: text.into(),
            number,
        }
    }

    /// Reference built from a name's own phrase.
    pub fn from_name(lex: &Lexicon, name: &NLName, no_article: bool) -> Self {
        let options = NameOptions {
            article: if no_article {
                ArticleChoice::Omit
            } else {
                ArticleChoice::AsIs
            },
            ..NameOptions::default()
        };
        Self {
            text: realize_nlname(lex, name, &options),
            number: name_number(name, &options),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSentence {
    /// Realized words without the final period.
    pub tokens: Vec<String>,
    pub text: String,
}

/// Words of a plan with the given texts in its reference slots.
pub fn realize_plan_tokens(lex: &Lexicon, plan: &SentencePlan, s: &RefExpr, o: &RefExpr) -> Vec<String> {
    let number_of = |idx: Option<usize>| -> Number {
        match idx.and_then(|i| plan.slots.get(i)) {
            Some(PlanSlot::Ref { role: Role::S, .. }) => s.number,
            Some(PlanSlot::Ref { role: Role::O, .. }) => o.number,
            Some(PlanSlot::Noun { number, .. }) => *number,
            _ => Number::Singular,
        }
    };
    let mut out: Vec<String> = Vec::new();
    for slot in &plan.slots {
        match slot {
            PlanSlot::Ref { role, case, .. } => {
                let r = match role {
                    Role::S => s,
                    Role::O => o,
                };
                out.extend(r.text.split_whitespace().map(str::to_string));
                if *case == Case::Possessive {
                    out.push("'s".into());
                }
            }
            PlanSlot::Verb {
                lemma,
                voice,
                tense,
                polarity,
                form,
                agr,
            } => {
                let spec = VerbSpec {
                    lemma,
                    voice: *voice,
                    tense: *tense,
                    polarity: *polarity,
                    form: *form,
                };
                out.extend(inflect_verb(lex, &spec, number_of(*agr)));
            }
            PlanSlot::Noun {
                lemma,
                number,
                capitalized,
            } => {
                let form = inflect_noun(lex, lemma, *number);
                out.push(if *capitalized { capitalize(&form) } else { form });
            }
            PlanSlot::Adjective { lemma } => out.push(lemma.clone()),
            PlanSlot::Preposition { form } => out.push(form.clone()),
            PlanSlot::FixedString { text } => out.extend(text.split_whitespace().map(str::to_string)),
        }
    }
    out
}

/// A full sentence: first letter capitalized, final period.
pub fn realize_plan(lex: &Lexicon, plan: &SentencePlan, s: &RefExpr, o: &RefExpr) -> GeneratedSentence {
    let tokens = realize_plan_tokens(lex, plan, s, o);
    let body = join_words(&tokens);
    let text = format!("{}.", capitalize(&body));
    GeneratedSentence { tokens, text }
}

/// Realizes a plan for two names, honouring the plan's no-article requests.
pub fn realize_with_names(lex: &Lexicon, plan: &SentencePlan, s: &NLName, o: &NLName) -> GeneratedSentence {
    let no_article = |role| {
        plan.slots
            .iter()
            .any(|slot| matches!(slot, PlanSlot::Ref { role: r, no_article: true, .. } if *r == role))
    };
    let s_ref = RefExpr::from_name(lex, s, no_article(Role::S));
    let o_ref = RefExpr::from_name(lex, o, no_article(Role::O));
    realize_plan(lex, plan, &s_ref, &o_ref)
}

/// The builtin plan for isA and instanceOf: "S is a kind of O".
pub fn kind_of_plan() -> SentencePlan {
    SentencePlan::new(vec![
        PlanSlot::reference(Role::S, Case::Nominative),
        PlanSlot::Verb {
            lemma: "be".into(),
            voice: Voice::Active,
            tense: Tense::Present,
            polarity: Polarity::Positive,
            form: VerbForm::Finite,
            agr: Some(0),
        },
        PlanSlot::FixedString {
            text: "a kind of".into(),
        },
        PlanSlot::Ref {
            role: Role::O,
            case: Case::Nominative,
            no_article: true,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> &'static Lexicon {
        Lexicon::shared()
    }

    #[test]
    fn pluralizes_regular_and_irregular_nouns() {
        assert_eq!(inflect_noun(lex(), "wine", Number::Plural), "wines");
        assert_eq!(inflect_noun(lex(), "grape", Number::Singular), "grape");
        assert_eq!(inflect_noun(lex(), "child", Number::Plural), "children");
        assert_eq!(inflect_noun(lex(), "box", Number::Plural), "boxes");
        assert_eq!(inflect_noun(lex(), "city", Number::Plural), "cities");
        assert_eq!(inflect_noun(lex(), "day", Number::Plural), "days");
    }

    #[test]
    fn singularizes_by_rule() {
        assert_eq!(lex().singular("grapes"), "grape");
        assert_eq!(lex().singular("cities"), "city");
        assert_eq!(lex().singular("children"), "child");
        assert_eq!(lex().singular("glass"), "glass");
    }

    fn spec(lemma: &str, voice: Voice) -> VerbSpec<'_> {
        VerbSpec {
            lemma,
            voice,
            tense: Tense::Present,
            polarity: Polarity::Positive,
            form: VerbForm::Finite,
        }
    }

    #[test]
    fn passive_agrees_with_number() {
        assert_eq!(inflect_verb(lex(), &spec("make", Voice::Passive), Number::Singular), ["is", "made"]);
        assert_eq!(inflect_verb(lex(), &spec("make", Voice::Passive), Number::Plural), ["are", "made"]);
        assert_eq!(inflect_verb(lex(), &spec("be", Voice::Active), Number::Singular), ["is"]);
    }

    #[test]
    fn active_forms() {
        assert_eq!(inflect_verb(lex(), &spec("produce", Voice::Active), Number::Singular), ["produces"]);
        let neg = VerbSpec {
            polarity: Polarity::Negative,
            ..spec("produce", Voice::Active)
        };
        assert_eq!(inflect_verb(lex(), &neg, Number::Singular), ["does", "not", "produce"]);
        let prog = VerbSpec {
            form: VerbForm::Progressive,
            ..spec("stop", Voice::Active)
        };
        assert_eq!(inflect_verb(lex(), &prog, Number::Plural), ["are", "stopping"]);
        assert_eq!(lex().past("visit"), "visited");
        assert_eq!(lex().past("stop"), "stopped");
        assert_eq!(lex().present_participle("make"), "making");
    }

    #[test]
    fn verb_lemmas_from_forms() {
        assert_eq!(lex().verb_lemma("made"), "make");
        assert_eq!(lex().verb_lemma("is"), "be");
        assert_eq!(lex().verb_lemma("produces"), "produce");
    }

    #[test]
    fn article_choice() {
        assert_eq!(lex().indefinite_article("apple"), "an");
        assert_eq!(lex().indefinite_article("hour"), "an");
        assert_eq!(lex().indefinite_article("university"), "a");
        assert_eq!(lex().indefinite_article("red"), "a");
    }

    fn piemonte() -> NLName {
        "[]{article,indef,agr=3} [traditional]{adj} [wine]{noun,head,sing,neut} [from]{prep} \
         []{article,def,agr=6} [Piemonte]{noun,sing,neut,cap} [region]{noun,sing,neut}"
            .parse()
            .unwrap()
    }

    #[test]
    fn realizes_name_with_number_adjustment() {
        let name = piemonte();
        assert_eq!(
            realize_nlname(lex(), &name, &NameOptions::default()),
            "a traditional wine from the Piemonte region"
        );
        let plural = NameOptions {
            number: Some(Number::Plural),
            ..NameOptions::default()
        };
        assert_eq!(
            realize_nlname(lex(), &name, &plural),
            "traditional wines from the Piemonte region"
        );
        let pron = NameOptions {
            pronoun: true,
            ..NameOptions::default()
        };
        assert_eq!(realize_nlname(lex(), &name, &pron), "it");
    }

    #[test]
    fn an_before_vowel_adjective() {
        let name: NLName = "[]{article,indef,agr=3} [old]{adj} [wine]{noun,head,sing,neut}"
            .parse()
            .unwrap();
        assert_eq!(realize_nlname(lex(), &name, &NameOptions::default()), "an old wine");
    }

    #[test]
    fn kind_of_sentence() {
        let s = RefExpr::new("St. Emilion", Number::Singular);
        let o = RefExpr::new("Bordeaux", Number::Singular);
        assert_eq!(realize_plan(lex(), &kind_of_plan(), &s, &o).text, "St. Emilion is a kind of Bordeaux.");
    }

    #[test]
    fn negative_plan() {
        let plan: SentencePlan =
            "[ref(S)]{nom} [make]{verb,passive,present,agr=1,polarity=-} [from]{prep} [ref(O)]{acc}"
                .parse()
                .unwrap();
        let s = RefExpr::new("Semillon", Number::Singular);
        let o = RefExpr::new("Semillon grapes", Number::Plural);
        assert_eq!(
            realize_plan(lex(), &plan, &s, &o).text,
            "Semillon is not made from Semillon grapes."
        );
    }

    #[test]
    fn possessive_reference_attaches_clitic() {
        let plan: SentencePlan = "[ref(S)]{poss} [maker]{noun,sing} [be]{verb,agr=2} [ref(O)]{nom}"
            .parse()
            .unwrap();
        let s = RefExpr::new("St. Emilion", Number::Singular);
        let o = RefExpr::new("Chateau X", Number::Singular);
        assert_eq!(
            realize_plan(lex(), &plan, &s, &o).text,
            "St. Emilion's maker is Chateau X."
        );
    }
}
