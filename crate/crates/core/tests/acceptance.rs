//! End-to-end checks, one line each. Runs without the libtest harness so
//! the PASS/FAIL lines are always printed.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lexforge::corpus::{CorpusBuilder, CorpusConfig, CorpusStore};
use lexforge::features::{extraction_features, feature_names, RelationContext, FEATURE_COUNT, GROUPS};
use lexforge::maxent::{gradient_check, loo_evaluate, Instance, Model, TrainConfig};
use lexforge::nlname::{align_tokens, alt_names, levenshtein, similarity};
use lexforge::ontology::Ontology;
use lexforge::pipeline::{interest_entries, load_manual_names, name_entries, plan_entries, RunConfig};
use lexforge::ranker::{bootstrap_conf, rank_sp, rank_sp_star, RERANK_DEPTH};
use lexforge::realize::{join_words, realize_nlname, realize_plan, ArticleChoice, Lexicon, NameOptions, RefExpr};
use lexforge::sentplan::{extract_plans, ExtractConfig};
use lexforge::slots::Number;
use lexforge::store::{agreement_report, ranking_metrics, sha256_hex, EntityEntry, JudgedRanking, NameEntry, ResourceBundle};

fn fixture(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/wine").join(file)
}

fn wine() -> (Ontology, CorpusStore) {
    let onto = Ontology::load(fixture("wine.ont")).unwrap();
    let mut b = CorpusBuilder::new(CorpusConfig::default());
    b.ingest(fixture("corpus.txt"), "default").unwrap();
    (onto, b.freeze())
}

fn alt_texts(onto: &Ontology, id: &str) -> (bool, Vec<String>) {
    let set = alt_names(onto, onto.entity_id(id).unwrap());
    (set.anonymous, set.alternatives.iter().map(|n| n.text()).collect())
}

fn anonymity() {
    let start = Instant::now();
    let onto = Ontology::load(fixture("wine.ont")).unwrap();
    assert!(alt_texts(&onto, ":KalinCellarsSemillon").0);
    assert!(alt_texts(&onto, ":exhibit23").0);
    assert_eq!(alt_texts(&onto, ":SouthAustraliaRegion"), (false, vec!["South Australia".to_string()]));
    assert_eq!(alt_texts(&onto, ":red"), (false, vec!["red color".to_string()]));
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "{elapsed:?}");
}

fn similarity_oracle() {
    assert_eq!(levenshtein("national", "National"), 0);
    assert_eq!(levenshtein("arch", "Archaeological"), 10);
    assert_eq!(levenshtein("napoli", "Naples"), 4);
    let name: Vec<&str> = "national arch napoli museum".split(' ').collect();
    let np: Vec<&str> = "the Naples National Archaeological Museum".split(' ').collect();
    let a = align_tokens(Lexicon::shared(), &name, &np);
    let got = similarity(&a, np.len(), name.len());
    // Distances normalized by the summed lengths: 10/18 and 4/12.
    let want: f64 = (1.0 + (1.0 - 10.0 / 18.0) + (1.0 - 4.0 / 12.0) + 1.0) / 5.0;
    assert!((want - 0.622_222_222_222_222_2).abs() < 1e-12);
    assert!((got - want).abs() < 1e-9, "{got}");
}

fn template_fixture() {
    let (onto, store) = wine();
    let names = load_manual_names(&onto, fixture("names.txt")).unwrap();
    let relation = onto.relation_id(":madeFrom").unwrap();
    let ex = extract_plans(&onto, &store, Lexicon::shared(), relation, &names, &ExtractConfig::default()).unwrap();
    let base: Vec<String> = ex.templates.iter().filter(|t| t.extends.is_none()).map(|t| t.to_string()).collect();
    assert_eq!(base, ["S is made from O"]);
    let extended: BTreeSet<String> = ex.templates.iter().filter(|t| t.extends == Some(0)).map(|t| t.to_string()).collect();
    let want: BTreeSet<String> = [
        "obviously S is made from O",
        "obviously S is made from O in",
        "obviously S is made from O in California",
        "S is made from O in",
        "S is made from O in California",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(extended, want);
    for t in &ex.templates {
        let sentences: BTreeSet<_> = t.instances.iter().map(|i| ex.occurrences[i.occurrence].sentence).collect();
        assert!(sentences.len() >= 2, "{t} comes from one sentence");
    }
    assert!(ex.templates.iter().all(|t| !t.to_string().contains("produced")));
}

fn feature_schema() {
    assert_eq!(FEATURE_COUNT, 251);
    assert_eq!(feature_names().len(), FEATURE_COUNT);
    assert_eq!(
        GROUPS,
        [
            ("productivity", 100),
            ("prominence", 20),
            ("pmi", 55),
            ("token", 55),
            ("grammaticality", 4),
            ("misc", 17),
        ]
    );

    let (store, ex) = common::setup();
    let ctx = RelationContext::new(&store, Lexicon::shared(), &ex, vec!["made".into(), "from".into()]);
    let table = extraction_features(&ctx);
    let expected = common::oracle_rows(&store, &ex);
    assert!(!expected.is_empty());
    assert_eq!(table.rows.len(), expected.len());
    for (row, want) in table.rows.iter().zip(&expected) {
        assert_eq!(row.len(), FEATURE_COUNT);
        for (j, w) in want.iter().enumerate() {
            assert!((row[j] - w).abs() < 1e-9, "feature {j}: {} vs {w}", row[j]);
        }
    }
}

fn random_data(rng: &mut ChaCha8Rng, n: usize, dims: usize, noise: f64) -> Vec<Instance> {
    let direction: Vec<f64> = (0..dims).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (0..n)
        .map(|i| {
            let x: Vec<f64> = (0..dims).map(|_| rng.gen_range(0.0..1.0)).collect();
            let margin: f64 = x.iter().zip(&direction).map(|(a, b)| (a - 0.5) * b).sum();
            let flip = rng.gen_bool(noise);
            Instance::new(x, (margin > 0.0) != flip, format!("r{i}"))
        })
        .collect()
}

fn maxent_gradient() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for round in 0..5 {
        let data = random_data(&mut rng, 12, 4, 0.2);
        let mut model = Model::zeros(4);
        model.weights = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        model.bias = rng.gen_range(-1.0..1.0);
        model.config.l2 = 0.1;
        let rel = gradient_check(&model, &data);
        assert!(rel <= 1e-6, "round {round}: {rel}");
    }
}

fn maxent_loo() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noisy = random_data(&mut rng, 40, 6, 0.15);
    let curve = loo_evaluate(&noisy, &TrainConfig::default()).unwrap();
    assert_eq!(curve.len(), 10);
    let train_avg = curve.iter().map(|p| p.train_error).sum::<f64>() / 10.0;
    let test_avg = curve.iter().map(|p| p.test_error).sum::<f64>() / 10.0;
    assert!(train_avg <= test_avg, "train {train_avg} test {test_avg}");

    // Two well separated clusters.
    let separable: Vec<Instance> = (0..40)
        .map(|i| {
            let positive = i % 2 == 0;
            let centre = if positive { 0.8 } else { 0.2 };
            let x = vec![centre + rng.gen_range(-0.15..0.15), centre + rng.gen_range(-0.15..0.15)];
            Instance::new(x, positive, format!("s{i}"))
        })
        .collect();
    let curve = loo_evaluate(&separable, &TrainConfig::default()).unwrap();
    let full = curve.last().unwrap();
    assert!(full.test_error <= 0.05, "{full:?}");
}

fn bootstrap_confidence() {
    assert!((bootstrap_conf(3, 1, 10) - 0.75 * 10f64.ln()).abs() < 1e-9);
    assert_eq!(bootstrap_conf(0, 4, 10), 0.0);
    assert_eq!(bootstrap_conf(3, 1, 1), 0.0);
}

fn sp_star_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let probs: Vec<f64> = (0..12).map(|_| rng.gen_range(0.0..1.0)).collect();
        let sp = rank_sp(":r", &probs);
        let covers: Vec<f64> = (0..12).map(|_| rng.gen_range(0.0..1.0)).collect();
        let star = rank_sp_star(&sp, |id| covers[id]);
        assert_eq!(star.candidates[RERANK_DEPTH..], sp.candidates[RERANK_DEPTH..]);
        assert_eq!(star.candidates.len(), 12);
    }
    for (p1, p2) in [(0.9, 0.4), (0.9, 0.0), (0.5, 0.5)] {
        let mut probs = vec![p1, p2];
        probs.extend((0..10).map(|i| p2 * (0.9 - i as f64 * 0.05)));
        let sp = rank_sp(":r", &probs);
        assert_eq!((sp.candidates[0].id, sp.candidates[1].id), (0, 1));
        let star = rank_sp_star(&sp, |id| if id == 1 { 1.0 } else { 0.0 });
        let swapped = star.candidates[0].id == 1;
        assert_eq!(swapped, p1 * 0.0 < p2 * 1.0, "p1 {p1} p2 {p2}");
        assert_eq!(star.candidates[RERANK_DEPTH..], sp.candidates[RERANK_DEPTH..]);
    }
}

fn realization() {
    let (onto, store) = wine();
    let lex = Lexicon::shared();
    let names = load_manual_names(&onto, fixture("names.txt")).unwrap();
    let relation = onto.relation_id(":madeFrom").unwrap();
    let ex = extract_plans(&onto, &store, lex, relation, &names, &ExtractConfig::default()).unwrap();
    let plan = &ex.plans.iter().find(|p| p.templates == [0]).unwrap().plan;
    let reference = |id: &str, number: Number| {
        let options = NameOptions {
            number: Some(number),
            article: ArticleChoice::Omit,
            ..NameOptions::default()
        };
        RefExpr::new(realize_nlname(lex, &names[&onto.entity_id(id).unwrap()], &options), number)
    };
    let sentence = |s: RefExpr, o: RefExpr| {
        let out = realize_plan(lex, plan, &s, &o);
        assert_eq!(out.text, format!("{}.", out.text.trim_end_matches('.')));
        let body = join_words(&out.tokens);
        let mut chars = body.chars();
        chars.next().map(|c| c.to_uppercase().collect::<String>() + chars.as_str()).unwrap_or_default()
    };
    assert_eq!(
        sentence(reference(":StEmilion", Number::Singular), reference(":cabernetSauvignonGrape", Number::Plural)),
        "St. Emilion is made from Cabernet Sauvignon grapes"
    );
    assert_eq!(
        sentence(reference(":Semillon", Number::Singular), reference(":SemillonGrape", Number::Plural)),
        "Semillon is made from Semillon grapes"
    );
    assert_eq!(
        sentence(reference(":Wine", Number::Plural), reference(":Grape", Number::Plural)),
        "Wines are made from grapes"
    );
}

fn four_targets() -> ResourceBundle {
    let mut b = ResourceBundle::new(sha256_hex(b"four targets"));
    for t in [":A", ":B", ":C", ":D"] {
        let candidates = ["a", "b", "c", "d", "e"]
            .iter()
            .map(|w| NameEntry {
                name: format!("[{w}]{{noun,head,sing,neut}}").parse().unwrap(),
                phrase: w.to_string(),
                score: 1.0,
                crossed_edges: 0,
                frequency: 1,
                realized: w.to_string(),
                example: format!("{w} is a kind of thing."),
                pronoun_example: "It is a kind of thing.".into(),
            })
            .collect();
        b.entities.insert(
            t.into(),
            EntityEntry {
                kind: "class".into(),
                mentions: 1,
                anonymous: false,
                alt_names: Vec::new(),
                candidates,
                warnings: Vec::new(),
            },
        );
    }
    b
}

fn metrics() {
    let j = |c: &[bool], w: f64| JudgedRanking {
        correct: c.to_vec(),
        weight: w,
    };
    let m = ranking_metrics(&[
        j(&[true, false], 1.0),
        j(&[false, true, true], 2.0),
        j(&[false, false, false, false, true], 1.0),
        j(&[false; 5], 4.0),
    ]);
    assert_eq!(m.one_in_1, 0.25);
    assert_eq!(m.one_in_3, 0.5);
    assert_eq!(m.one_in_5, 0.75);
    assert_eq!(m.mrr, (1.0 + 0.5 + 0.2) / 4.0);
    assert_eq!(m.weighted_mrr, (1.0 + 2.0 * 0.5 + 0.2) / 8.0);

    // Top marks: gold 1, 3, none, 1; other 1, 2, none, 1.
    let mut b = four_targets();
    b.record_selection(":A", Some(0), "gold", true, 0).unwrap();
    b.record_selection(":A", Some(1), "gold", false, 0).unwrap();
    b.record_selection(":B", Some(2), "gold", true, 0).unwrap();
    b.record_selection(":C", None, "gold", true, 0).unwrap();
    b.record_selection(":D", Some(0), "gold", true, 0).unwrap();
    b.record_selection(":A", Some(0), "other", true, 0).unwrap();
    b.record_selection(":B", Some(1), "other", true, 0).unwrap();
    b.record_selection(":C", None, "other", true, 0).unwrap();
    b.record_selection(":D", Some(0), "other", true, 0).unwrap();
    let r = agreement_report(&b, "gold", "other").unwrap();
    // po = 3/4, pe = 1/2 * 1/2 + 1/4 * 1/4 = 5/16
    assert!((r.kappa - 7.0 / 11.0).abs() < 1e-15, "{}", r.kappa);
    assert_eq!(r.micro_precision, Some(2.0 / 3.0));
    assert_eq!(r.gold_one_in_k, 0.75);
}

fn full_run() -> String {
    let (onto, store) = wine();
    let lex = Lexicon::shared();
    let config = RunConfig::default();
    let mut bundle = ResourceBundle::new(sha256_hex(&std::fs::read(fixture("wine.ont")).unwrap()));
    bundle.config = config.snapshot();
    bundle.entities = name_entries(&onto, &store, lex, &config).unwrap();
    let manual = load_manual_names(&onto, fixture("names.txt")).unwrap();
    bundle.interest = interest_entries(&onto, &store, lex, &manual);
    bundle.relations = plan_entries(&onto, &store, lex, &manual, &config, None, true)
        .unwrap()
        .relations;
    bundle.to_canonical_json().unwrap()
}

fn determinism() {
    let a = full_run();
    let b = full_run();
    assert!(a.len() > 1000);
    assert!(a == b, "bundles differ");
}

const CHECKS: &[(&str, fn())] = &[
    ("anonymity and alternative names on the wine ontology", anonymity),
    ("museum similarity and raw edit distances", similarity_oracle),
    ("made-from templates and their extensions", template_fixture),
    ("feature schema and brute-force counting oracle", feature_schema),
    ("maxent gradient against finite differences", maxent_gradient),
    ("maxent leave-one-out curves", maxent_loo),
    ("bootstrap template confidence", bootstrap_confidence),
    ("SP* re-ranking invariant", sp_star_invariant),
    ("realized made-from sentences", realization),
    ("ranking metrics and kappa on four targets", metrics),
    ("byte-identical bundles across runs", determinism),
];

fn main() -> ExitCode {
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in CHECKS {
        match panic::catch_unwind(AssertUnwindSafe(check)) {
            Ok(()) => println!("PASS {name}"),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL {name}: {msg}");
                failed += 1;
            }
        }
    }
    println!("{} of {} checks passed", CHECKS.len() - failed, CHECKS.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
