//! Brute-force recount of the counting features over every
//! (seed pair, occurrence, template) combination.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lexforge::corpus::{CorpusBuilder, CorpusConfig, CorpusStore};
use lexforge::features::normalized_pmi;
use lexforge::realize::Lexicon;
use lexforge::sentplan::{extract_from_seeds, ExtractConfig, Extraction, SeedPair};

const CORPUS: &str = "\
doc a query=q rank=1
s :: Semillon/NNP/Semillon is/VBZ/be made/VBN/make from/IN/from Semillon/JJ/Semillon grapes/NNS/grape :: NP(0,1,1) NP(4,6,1) :: subj(2,0) other(2,1) other(2,3) prepcomp(3,5) amod(5,4)
end
doc b query=q rank=2
s :: Semillon/NNP/Semillon is/VBZ/be made/VBN/make from/IN/from grapes/NNS/grape :: NP(0,1,1) NP(4,5,1) :: subj(2,0) other(2,1) other(2,3) prepcomp(3,4)
end
doc c query=q rank=3
s :: wine/NN/wine is/VBZ/be made/VBN/make from/IN/from grapes/NNS/grape in/IN/in Australia/NNP/Australia :: NP(0,1,1) NP(4,5,1) NP(6,7,1) :: subj(2,0) other(2,1) other(2,3) prepcomp(3,4) other(4,5) prepcomp(5,6)
s :: the/DT/the wine/NN/wine is/VBZ/be often/RB/often made/VBN/make from/IN/from grapes/NNS/grape :: NP(0,2,1) NP(6,7,1) :: det(1,0) subj(4,1) other(4,2) other(4,3) other(4,5) prepcomp(5,6)
end
";

pub fn setup() -> (CorpusStore, Extraction) {
    let mut b = CorpusBuilder::new(CorpusConfig::default());
    b.ingest_str(CORPUS, "g").unwrap();
    let store = b.freeze();
    let pair = |a: &str, b: &str, s1: bool, s2: bool| SeedPair {
        n1: a.split(' ').map(str::to_string).collect(),
        n2: b.split(' ').map(str::to_string).collect(),
        n1_secondary: s1,
        n2_secondary: s2,
    };
    let seeds = vec![
        pair("Semillon", "Semillon grape", false, false),
        pair("Semillon", "grape", false, true),
        pair("wine", "grape", true, true),
    ];
    let config = ExtractConfig {
        min_sentences: 1,
        ..ExtractConfig::default()
    };
    let ex = extract_from_seeds(&store, Lexicon::shared(), "g", seeds, &config).unwrap();
    (store, ex)
}

/// Item fields: n1, n2, a1, a2, template text, sentence.
type Fields = [String; 6];

const N1: usize = 0;
const N2: usize = 1;
const A1: usize = 2;
const A2: usize = 3;
const T: usize = 4;
const S: usize = 5;

const VARIANTS: [&[usize]; 20] = [
    &[N1, N2],
    &[N1],
    &[N2],
    &[A1, A2],
    &[A1],
    &[A2],
    &[T],
    &[S],
    &[N1, N2, T],
    &[N1, T],
    &[N2, T],
    &[A1, A2, T],
    &[A1, T],
    &[A2, T],
    &[N1, N2, A1, A2],
    &[N1, A1],
    &[N2, A2],
    &[N1, N2, A1, A2, T],
    &[N1, A1, T],
    &[N2, A2, T],
];

const PMI: [(usize, usize, usize); 11] = [
    (0, 1, 2),
    (8, 0, 6),
    (9, 1, 6),
    (10, 2, 6),
    (3, 4, 5),
    (11, 3, 6),
    (12, 4, 6),
    (13, 5, 6),
    (14, 0, 3),
    (15, 1, 4),
    (16, 2, 5),
];

struct Unit {
    fields: Fields,
    weight: f64,
    templates: BTreeSet<usize>,
}

fn project(f: &Fields, which: &[usize]) -> Vec<String> {
    which.iter().map(|&i| f[i].clone()).collect()
}

/// Counting units of one variant: seed matches (i, o) or (i, o, k), or
/// extractions (o, k) for the template and sentence versions.
fn units(store: &CorpusStore, ex: &Extraction, variant: &[usize]) -> Vec<Unit> {
    let plain = variant == [T] || variant == [S];
    let with_t = variant.contains(&T) || plain;
    let mut out = Vec::new();
    for (o, occ) in ex.occurrences.iter().enumerate() {
        let (a1, a2) = occ.anchor_texts(store);
        let producing: Vec<usize> = (0..ex.templates.len())
            .filter(|&k| ex.templates[k].instances.iter().any(|i| i.occurrence == o))
            .collect();
        let seeds: Vec<Option<usize>> = if plain {
            vec![None]
        } else {
            occ.matches.iter().map(|m| Some(m.seed)).collect()
        };
        for seed in seeds {
            let (n1, n2, weight) = match seed {
                Some(i) => {
                    let (n1, n2) = ex.seeds[i].key();
                    (n1, n2, ex.seeds[i].weight())
                }
                None => (String::new(), String::new(), 1.0),
            };
            let sentence = occ.sentence.to_string();
            let make = |t: String, templates: BTreeSet<usize>| Unit {
                fields: [n1.clone(), n2.clone(), a1.clone(), a2.clone(), t, sentence.clone()],
                weight,
                templates,
            };
            if with_t {
                for &k in &producing {
                    out.push(make(ex.templates[k].to_string().to_lowercase(), BTreeSet::from([k])));
                }
            } else if !producing.is_empty() {
                out.push(make(String::new(), producing.iter().copied().collect()));
            }
        }
    }
    out
}

fn stats(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return vec![0.0; 5];
    }
    let n = v.len() as f64;
    let sum: f64 = v.iter().sum();
    let mean = sum / n;
    let sd = (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    let max = v.iter().cloned().fold(f64::MIN, f64::max);
    let min = v.iter().cloned().fold(f64::MAX, f64::min);
    vec![max, min, mean, sum, sd]
}

struct Tally {
    hits: BTreeMap<Vec<String>, f64>,
    total: f64,
}

fn tally(units: &[Unit], which: &[usize]) -> Tally {
    let mut hits = BTreeMap::new();
    let mut total = 0.0;
    for u in units {
        *hits.entry(project(&u.fields, which)).or_insert(0.0) += u.weight;
        total += u.weight;
    }
    Tally { hits, total }
}

fn prod(t: &Tally, key: &[String]) -> f64 {
    t.hits.get(key).copied().unwrap_or(0.0) / t.total
}

pub fn oracle_rows(store: &CorpusStore, ex: &Extraction) -> Vec<Vec<f64>> {
    let all_units: Vec<Vec<Unit>> = VARIANTS.iter().map(|v| units(store, ex, v)).collect();
    let tallies: Vec<Tally> = VARIANTS.iter().zip(&all_units).map(|(v, u)| tally(u, v)).collect();
    let mut rows = Vec::new();
    for plan in &ex.plans {
        let mut row = Vec::new();
        let of_plan = |v: usize| -> Vec<&Unit> {
            all_units[v]
                .iter()
                .filter(|u| u.templates.iter().any(|k| plan.templates.contains(k)))
                .collect()
        };
        for (v, which) in VARIANTS.iter().enumerate() {
            let items: BTreeSet<Vec<String>> = of_plan(v).iter().map(|u| project(&u.fields, which)).collect();
            let values: Vec<f64> = items.iter().map(|k| prod(&tallies[v], k)).collect();
            row.extend(stats(&values));
        }
        for (v, which) in VARIANTS.iter().enumerate() {
            let items: BTreeSet<Vec<String>> = of_plan(v).iter().map(|u| project(&u.fields, which)).collect();
            let all = tallies[v].hits.values().filter(|h| **h > 0.0).count();
            row.push(items.len() as f64 / all as f64);
        }
        for (j, a, b) in PMI {
            let mut seen = BTreeSet::new();
            let mut values = Vec::new();
            for u in of_plan(j) {
                let key = project(&u.fields, VARIANTS[j]);
                if seen.insert(key.clone()) {
                    values.push(normalized_pmi(
                        prod(&tallies[j], &key),
                        prod(&tallies[a], &project(&u.fields, VARIANTS[a])),
                        prod(&tallies[b], &project(&u.fields, VARIANTS[b])),
                    ));
                }
            }
            row.extend(stats(&values));
        }
        rows.push(row);
    }
    rows
}

