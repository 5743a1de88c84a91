//! Token normalization shared by the corpus index, the anchor matcher and the
//! token-based plan features: lowercasing, accent folding, Porter stemming,
//! stop-word removal and the `<num>` pseudo-token.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Pseudo-token standing in for every numeric token in tf-idf vectors.
pub const NUM_TOKEN: &str = "<num>";

static STOP_WORDS: OnceLock<HashSet<String>> = OnceLock::new();

pub(crate) fn word_list(source: &str) -> impl Iterator<Item = &str> {
    source
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

/// The shipped English stop-word list.
pub fn stop_words() -> &'static HashSet<String> {
    STOP_WORDS.get_or_init(|| {
        word_list(include_str!("../data/stopwords.txt"))
            .map(str::to_string)
            .collect()
    })
}

pub fn is_stop_word(word: &str) -> bool {
    stop_words().contains(&word.to_lowercase())
}

/// Lowercases and strips combining accents ("Côte" -> "cote").
pub fn fold(word: &str) -> String {
    word.nfd()
        .filter(|c| !is_combining_mark(*c))
        .collect::<String>()
        .to_lowercase()
}

pub fn is_numeric(word: &str) -> bool {
    let digits = word.chars().filter(|c| c.is_ascii_digit()).count();
    digits > 0
        && word
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '-' | '/'))
}

fn has_alphanumeric(word: &str) -> bool {
    word.chars().any(char::is_alphanumeric)
}

/// Folded Porter stem of a single surface token. Tokens without letters or
/// digits stem to the empty string.
pub fn stem(word: &str) -> String {
    let folded = fold(word);
    if !has_alphanumeric(&folded) {
        return String::new();
    }
    if folded.chars().all(|c| c.is_ascii_alphabetic()) {
        porter_stemmer::stem(&folded)
    } else {
        folded
    }
}

/// Stems of the content words of `words`: stop words and punctuation are
/// dropped, numbers become [`NUM_TOKEN`].
pub fn content_terms<S: AsRef<str>>(words: &[S]) -> Vec<String> {
    words
        .iter()
        .map(AsRef::as_ref)
        .flat_map(split_phrase)
        .filter(|w| !is_stop_word(w))
        .filter_map(|w| {
            if is_numeric(&w) {
                Some(NUM_TOKEN.to_string())
            } else {
                let s = stem(&w);
                (!s.is_empty()).then_some(s)
            }
        })
        .collect()
}

/// Splits a free-text phrase into whitespace tokens. Already-tokenized words
/// pass through unchanged.
pub fn split_phrase(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

/// Sparse tf-idf vector keyed by normalized term.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TermVector {
    weights: BTreeMap<String, f64>,
}

impl TermVector {
    pub fn is_zero(&self) -> bool {
        self.weights.values().all(|w| *w == 0.0)
    }

    pub fn weight(&self, term: &str) -> f64 {
        self.weights.get(term).copied().unwrap_or(0.0)
    }

    pub fn norm(&self) -> f64 {
        self.weights.values().map(|w| w * w).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &TermVector) -> f64 {
        self.weights
            .iter()
            .map(|(t, w)| w * other.weight(t))
            .sum()
    }

    pub fn cosine(&self, other: &TermVector) -> f64 {
        let denom = self.norm() * other.norm();
        if denom == 0.0 {
            0.0
        } else {
            (self.dot(other) / denom).clamp(0.0, 1.0)
        }
    }
}

/// Anything that can supply inverse document frequencies for normalized terms.
pub trait IdfSource {
    fn idf(&self, term: &str) -> f64;
}

/// Builds the tf-idf vector of a phrase: tf is the raw count of the term in
/// the phrase.
pub fn tfidf_vector<S: AsRef<str>>(words: &[S], idf: &dyn IdfSource) -> TermVector {
    let mut counts: BTreeMap<String, f64> = BTreeMap::new();
    for term in content_terms(words) {
        *counts.entry(term).or_default() += 1.0;
    }
    let weights = counts
        .into_iter()
        .map(|(t, tf)| {
            let w = tf * idf.idf(&t);
            (t, w)
        })
        .collect();
    TermVector { weights }
}

pub fn cosine<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T], idf: &dyn IdfSource) -> f64 {
    tfidf_vector(a, idf).cosine(&tfidf_vector(b, idf))
}

/// Smoothed idf: `ln((1 + N) / (1 + df)) + 1`. Positive for every term, so a
/// word present in all documents of a small group still carries weight.
pub fn smoothed_idf(documents: usize, document_frequency: usize) -> f64 {
    ((1.0 + documents as f64) / (1.0 + document_frequency as f64)).ln() + 1.0
}

/// Uppercases the first character.
pub fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn is_capitalized(word: &str) -> bool {
    word.chars().next().is_some_and(char::is_uppercase)
}

pub fn is_all_caps(word: &str) -> bool {
    let letters: Vec<char> = word.chars().filter(|c| c.is_alphabetic()).collect();
    letters.len() > 1 && letters.iter().all(|c| c.is_uppercase())
}
