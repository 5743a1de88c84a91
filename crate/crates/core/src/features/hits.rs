//! Weighted hit counts behind the productivity, prominence and PMI features.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::corpus::{CorpusStore, SentenceId};
use crate::sentplan::Extraction;

/// One element of an item key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Pair,
    N1,
    N2,
    AnchorPair,
    A1,
    A2,
    Template,
    Sentence,
}

/// A productivity version: the fields that identify its items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Variant {
    pub name: &'static str,
    pub fields: &'static [Field],
}

use Field::*;

pub const VARIANTS: [Variant; 20] = [
    Variant { name: "pair", fields: &[Pair] },
    Variant { name: "n1", fields: &[N1] },
    Variant { name: "n2", fields: &[N2] },
    Variant { name: "anchor_pair", fields: &[AnchorPair] },
    Variant { name: "a1", fields: &[A1] },
    Variant { name: "a2", fields: &[A2] },
    Variant { name: "template", fields: &[Template] },
    Variant { name: "sentence", fields: &[Sentence] },
    Variant { name: "pair_template", fields: &[Pair, Template] },
    Variant { name: "n1_template", fields: &[N1, Template] },
    Variant { name: "n2_template", fields: &[N2, Template] },
    Variant { name: "anchor_pair_template", fields: &[AnchorPair, Template] },
    Variant { name: "a1_template", fields: &[A1, Template] },
    Variant { name: "a2_template", fields: &[A2, Template] },
    Variant { name: "pair_anchor_pair", fields: &[Pair, AnchorPair] },
    Variant { name: "n1_a1", fields: &[N1, A1] },
    Variant { name: "n2_a2", fields: &[N2, A2] },
    Variant { name: "pair_anchor_pair_template", fields: &[Pair, AnchorPair, Template] },
    Variant { name: "n1_a1_template", fields: &[N1, A1, Template] },
    Variant { name: "n2_a2_template", fields: &[N2, A2, Template] },
];

/// PMI versions as (joint, first, second) indices into [`VARIANTS`].
pub const PMI_VARIANTS: [(usize, usize, usize); 11] = [
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

impl Variant {
    /// Template and sentence counts are plain extraction counts; every other
    /// version counts seed matches, weighted by the seed pair.
    fn counts_seed_matches(&self) -> bool {
        !matches!(self.fields, [Template] | [Sentence])
    }
}

/// A seed pair matching an anchor occurrence that yielded a template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HitEvent {
    pub seed: usize,
    pub occurrence: usize,
    pub template: usize,
}

pub type ItemKey = Vec<usize>;

/// Interned identities of seed names, anchors and sentences.
#[derive(Debug, Clone)]
pub struct Interner<T: Ord> {
    ids: BTreeMap<T, usize>,
    values: Vec<T>,
}

impl<T: Ord> Default for Interner<T> {
    fn default() -> Self {
        Self {
            ids: BTreeMap::new(),
            values: Vec::new(),
        }
    }
}

impl<T: Ord + Clone> Interner<T> {
    pub fn intern(&mut self, value: &T) -> usize {
        if let Some(&id) = self.ids.get(value) {
            return id;
        }
        let id = self.values.len();
        self.ids.insert(value.clone(), id);
        self.values.push(value.clone());
        id
    }

    pub fn get(&self, id: usize) -> &T {
        &self.values[id]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct HitCounters {
    pub events: Vec<HitEvent>,
    pub weights: Vec<f64>,
    /// Per seed: interned lowercase first and second names.
    seed_names: Vec<(usize, usize)>,
    /// Per occurrence: interned anchor pair, first anchor, second anchor, sentence.
    occurrence_keys: Vec<(usize, usize, usize, usize)>,
    pub names: Interner<String>,
    pub anchors: Interner<String>,
    pub anchor_pairs: Interner<(String, String)>,
    pub sentences: Interner<SentenceId>,
    hits: Vec<HashMap<ItemKey, f64>>,
    totals: Vec<f64>,
}

impl HitCounters {
    pub fn field(&self, event: &HitEvent, field: Field) -> usize {
        let (n1, n2) = self.seed_names[event.seed];
        let (ap, a1, a2, s) = self.occurrence_keys[event.occurrence];
        match field {
            Pair => event.seed,
            N1 => n1,
            N2 => n2,
            AnchorPair => ap,
            A1 => a1,
            A2 => a2,
            Template => event.template,
            Sentence => s,
        }
    }

    pub fn key(&self, event: &HitEvent, variant: usize) -> ItemKey {
        VARIANTS[variant]
            .fields
            .iter()
            .map(|&f| self.field(event, f))
            .collect()
    }

    pub fn hits(&self, variant: usize, key: &ItemKey) -> f64 {
        self.hits[variant].get(key).copied().unwrap_or(0.0)
    }

    pub fn total(&self, variant: usize) -> f64 {
        self.totals[variant]
    }

    pub fn productivity(&self, variant: usize, key: &ItemKey) -> f64 {
        let total = self.totals[variant];
        if total > 0.0 {
            self.hits(variant, key) / total
        } else {
            0.0
        }
    }

    /// Items of `variant` with a positive count.
    pub fn productive_items(&self, variant: usize) -> usize {
        self.hits[variant].values().filter(|h| **h > 0.0).count()
    }

    /// Events whose template is in `templates`.
    pub fn events_of<'a>(&'a self, templates: &'a [usize]) -> impl Iterator<Item = &'a HitEvent> + 'a {
        self.events.iter().filter(move |e| templates.contains(&e.template))
    }

    /// Distinct items of `variant` among the events of `templates`.
    pub fn items_of(&self, variant: usize, templates: &[usize]) -> BTreeSet<ItemKey> {
        self.events_of(templates).map(|e| self.key(e, variant)).collect()
    }
}

/// Collects the hit events of an extraction: every seed match of every
/// occurrence that an extracted template was read off.
pub fn count_hits(store: &CorpusStore, ex: &Extraction) -> HitCounters {
    let mut names = Interner::default();
    let seed_names: Vec<(usize, usize)> = ex
        .seeds
        .iter()
        .map(|s| {
            let (a, b) = s.key();
            (names.intern(&a), names.intern(&b))
        })
        .collect();
    let weights: Vec<f64> = ex.seeds.iter().map(|s| s.weight()).collect();
    let mut anchors = Interner::default();
    let mut anchor_pairs = Interner::default();
    let mut sentences = Interner::default();
    let occurrence_keys = ex
        .occurrences
        .iter()
        .map(|o| {
            let (a1, a2) = o.anchor_texts(store);
            (
                anchor_pairs.intern(&(a1.clone(), a2.clone())),
                anchors.intern(&a1),
                anchors.intern(&a2),
                sentences.intern(&o.sentence),
            )
        })
        .collect();

    let mut events = BTreeSet::new();
    for (k, t) in ex.templates.iter().enumerate() {
        for inst in &t.instances {
            for m in &ex.occurrences[inst.occurrence].matches {
                events.insert(HitEvent {
                    seed: m.seed,
                    occurrence: inst.occurrence,
                    template: k,
                });
            }
        }
    }
    let mut counters = HitCounters {
        events: events.into_iter().collect(),
        weights,
        seed_names,
        occurrence_keys,
        names,
        anchors,
        anchor_pairs,
        sentences,
        hits: vec![HashMap::new(); VARIANTS.len()],
        totals: vec![0.0; VARIANTS.len()],
    };
    for (v, variant) in VARIANTS.iter().enumerate() {
        let with_template = variant.fields.contains(&Template);
        let seeded = variant.counts_seed_matches();
        let mut seen: HashSet<(usize, usize, usize)> = HashSet::new();
        let mut hits: HashMap<ItemKey, f64> = HashMap::new();
        let mut total = 0.0;
        for e in &counters.events {
            let unit = (
                if seeded { e.seed } else { usize::MAX },
                e.occurrence,
                if with_template || !seeded { e.template } else { usize::MAX },
            );
            if !seen.insert(unit) {
                continue;
            }
            let w = if seeded { counters.weights[e.seed] } else { 1.0 };
            *hits.entry(counters.key(e, v)).or_default() += w;
            total += w;
        }
        counters.hits[v] = hits;
        counters.totals[v] = total;
    }
    counters
}
