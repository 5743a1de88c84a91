//! Interpolated trigram model used to score generated sentences.

use std::collections::HashMap;

const BOS: &str = "<s>";
const EOS: &str = "</s>";
const LAMBDAS: [f64; 3] = [0.6, 0.3, 0.1];

#[derive(Debug, Clone, Default)]
pub struct TrigramModel {
    unigrams: HashMap<String, usize>,
    bigrams: HashMap<(String, String), usize>,
    trigrams: HashMap<(String, String, String), usize>,
    /// Counts of words as bigram and trigram contexts.
    contexts1: HashMap<String, usize>,
    contexts2: HashMap<(String, String), usize>,
    tokens: usize,
}

fn padded<S: AsRef<str>>(sentence: &[S]) -> Vec<String> {
    let mut out = vec![BOS.to_string(), BOS.to_string()];
    out.extend(sentence.iter().map(|w| w.as_ref().to_lowercase()));
    out.push(EOS.to_string());
    out
}

impl TrigramModel {
    pub fn train<S: AsRef<str>>(sentences: &[Vec<S>]) -> Self {
        let mut m = Self::default();
        for s in sentences {
            let w = padded(s);
            for i in 2..w.len() {
                *m.unigrams.entry(w[i].clone()).or_default() += 1;
                m.tokens += 1;
                *m.bigrams.entry((w[i - 1].clone(), w[i].clone())).or_default() += 1;
                *m.contexts1.entry(w[i - 1].clone()).or_default() += 1;
                *m.trigrams
                    .entry((w[i - 2].clone(), w[i - 1].clone(), w[i].clone()))
                    .or_default() += 1;
                *m.contexts2.entry((w[i - 2].clone(), w[i - 1].clone())).or_default() += 1;
            }
        }
        m
    }

    pub fn is_empty(&self) -> bool {
        self.tokens == 0
    }

    fn prob(&self, u: &str, v: &str, w: &str) -> f64 {
        let vocab = self.unigrams.len() + 1;
        let uni = (self.unigrams.get(w).copied().unwrap_or(0) + 1) as f64 / (self.tokens + vocab) as f64;
        let mut p = LAMBDAS[2] * uni;
        let mut mass = LAMBDAS[2];
        let key1 = v.to_string();
        if let Some(&c) = self.contexts1.get(&key1) {
            let n = self.bigrams.get(&(key1, w.to_string())).copied().unwrap_or(0);
            p += LAMBDAS[1] * n as f64 / c as f64;
            mass += LAMBDAS[1];
        }
        let key2 = (u.to_string(), v.to_string());
        if let Some(&c) = self.contexts2.get(&key2) {
            let n = self
                .trigrams
                .get(&(key2.0, key2.1, w.to_string()))
                .copied()
                .unwrap_or(0);
            p += LAMBDAS[0] * n as f64 / c as f64;
            mass += LAMBDAS[0];
        }
        p / mass
    }

    /// Natural-log probability of the sentence including its end marker.
    pub fn log_prob<S: AsRef<str>>(&self, sentence: &[S]) -> f64 {
        let w = padded(sentence);
        (2..w.len()).map(|i| self.prob(&w[i - 2], &w[i - 1], &w[i]).ln()).sum()
    }

    /// Log probability divided by the number of words.
    pub fn score<S: AsRef<str>>(&self, sentence: &[S]) -> f64 {
        if sentence.is_empty() {
            return 0.0;
        }
        self.log_prob(sentence) / sentence.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<&str> {
        s.split(' ').collect()
    }

    #[test]
    fn fluent_beats_scrambled() {
        let lm = TrigramModel::train(&[
            words("semillon is made from semillon grapes"),
            words("wine is made from grapes"),
            words("gasoline is made from petroleum"),
        ]);
        let fluent = lm.score(&words("wine is made from petroleum"));
        let scrambled = lm.score(&words("from made petroleum is wine"));
        assert!(fluent > scrambled);
        assert!(fluent < 0.0);
    }

    #[test]
    fn distribution_sums_to_one() {
        let lm = TrigramModel::train(&[words("a b c"), words("a c b")]);
        let vocab = ["a", "b", "c", "</s>"];
        let mass: f64 = vocab.iter().map(|w| lm.prob("<s>", "a", w)).sum();
        // The unknown word takes the remaining unigram mass.
        let unk = lm.prob("<s>", "a", "zzz");
        assert!((mass + unk - 1.0).abs() < 1e-9, "{}", mass + unk);
    }
}
