//! Token alignment between a tokenized identifier and a noun phrase.

use serde::{Deserialize, Serialize};

use crate::realize::Lexicon;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub name_index: usize,
    pub np_index: usize,
    /// Normalized distance in `[0, 1]`.
    pub distance: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Alignment {
    pub pairs: Vec<AlignedPair>,
    pub crossed_edges: usize,
}

/// Edit distance over lowercased characters; insertion and deletion cost 1,
/// substitution 2.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.to_lowercase().chars().collect();
    let b: Vec<char> = b.to_lowercase().chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = if a[i - 1] == b[j - 1] { 0 } else { 2 };
            cur[j] = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + sub);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Raw distance divided by the summed character lengths.
pub fn normalized_distance(a: &str, b: &str) -> f64 {
    let total = a.to_lowercase().chars().count() + b.to_lowercase().chars().count();
    if total == 0 {
        return 0.0;
    }
    levenshtein(a, b) as f64 / total as f64
}

/// Number of index-order inversions among the pairs.
fn crossings(pairs: &[AlignedPair]) -> usize {
    let mut count = 0;
    for (k, p) in pairs.iter().enumerate() {
        for q in &pairs[k + 1..] {
            let by_name = p.name_index.cmp(&q.name_index);
            let by_np = p.np_index.cmp(&q.np_index);
            if by_name != by_np {
                count += 1;
            }
        }
    }
    count
}

/// Greedy alignment: candidate pairs are taken in ascending distance order,
/// each token at most once. Ignored words (articles, connectives) never align
/// and neither do tokens sharing no character.
pub fn align_tokens<S: AsRef<str>, T: AsRef<str>>(lex: &Lexicon, name: &[S], np: &[T]) -> Alignment {
    let mut candidates: Vec<AlignedPair> = Vec::new();
    for (i, a) in name.iter().enumerate() {
        if lex.is_ignored(a.as_ref()) {
            continue;
        }
        for (j, b) in np.iter().enumerate() {
            if lex.is_ignored(b.as_ref()) {
                continue;
            }
            let distance = normalized_distance(a.as_ref(), b.as_ref());
            if distance < 1.0 {
                candidates.push(AlignedPair {
                    name_index: i,
                    np_index: j,
                    distance,
                });
            }
        }
    }
    candidates.sort_by(|x, y| {
        x.distance
            .total_cmp(&y.distance)
            .then(x.name_index.cmp(&y.name_index))
            .then(x.np_index.cmp(&y.np_index))
    });
    let mut used_name = vec![false; name.len()];
    let mut used_np = vec![false; np.len()];
    let mut pairs = Vec::new();
    for c in candidates {
        if !used_name[c.name_index] && !used_np[c.np_index] {
            used_name[c.name_index] = true;
            used_np[c.np_index] = true;
            pairs.push(c);
        }
    }
    pairs.sort_by_key(|p| (p.name_index, p.np_index));
    let crossed_edges = crossings(&pairs);
    Alignment { pairs, crossed_edges }
}

/// Summed pair similarity over the longer of the two token sequences.
pub fn similarity(alignment: &Alignment, np_len: usize, name_len: usize) -> f64 {
    let denom = np_len.max(name_len);
    if denom == 0 {
        return 0.0;
    }
    alignment.pairs.iter().map(|p| 1.0 - p.distance).sum::<f64>() / denom as f64
}
