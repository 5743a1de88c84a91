use std::path::PathBuf;

use lexforge::corpus::{CorpusBuilder, CorpusConfig, CorpusStore};
use lexforge::ontology::Ontology;
use lexforge::pipeline::{
    interest_entries, load_manual_names, name_entries, names_from_bundle, plan_entries, RunConfig,
};
use lexforge::ranker::Method;
use lexforge::realize::Lexicon;
use lexforge::store::{sha256_hex, ResourceBundle};

fn fixture(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/wine").join(file)
}

fn inputs() -> (Ontology, CorpusStore) {
    let onto = Ontology::load(fixture("wine.ont")).unwrap();
    let mut b = CorpusBuilder::new(CorpusConfig::default());
    b.ingest(fixture("corpus.txt"), "default").unwrap();
    (onto, b.freeze())
}

fn full_run(boot: bool) -> ResourceBundle {
    let (onto, store) = inputs();
    let lex = Lexicon::shared();
    let config = RunConfig::default();
    let hash = sha256_hex(&std::fs::read(fixture("wine.ont")).unwrap());
    let mut bundle = ResourceBundle::new(hash);
    bundle.config = config.snapshot();
    bundle.entities = name_entries(&onto, &store, lex, &config).unwrap();
    let manual = load_manual_names(&onto, fixture("names.txt")).unwrap();
    bundle.interest = interest_entries(&onto, &store, lex, &manual);
    bundle.relations = plan_entries(&onto, &store, lex, &manual, &config, None, boot)
        .unwrap()
        .relations;
    bundle
}

#[test]
fn wine_bundle() {
    let bundle = full_run(true);
    assert!(bundle.entities[":KalinCellarsSemillon"].anonymous);
    assert!(bundle.entities[":exhibit23"].anonymous);
    assert!(bundle.entities[":RedWine"].anonymous);
    let red = &bundle.entities[":red"];
    assert_eq!(red.candidates.len(), 5);
    for c in &red.candidates {
        assert!(c.example.ends_with(" is a kind of color."), "{}", c.example);
        assert!(c.pronoun_example.starts_with("It is") || c.pronoun_example.starts_with("They are"));
    }
    let grape = &bundle.entities[":Grape"];
    assert!(grape.candidates.is_empty());
    assert_eq!(grape.warnings, ["no candidates: no documents"]);

    let made = &bundle.relations[":madeFrom"];
    let top = made.rankings[&Method::SpStar][0].id;
    assert_eq!(made.candidates[top].pattern, "S is made from O");
    assert_eq!(made.candidates[top].example, "St. Emilion is made from Cabernet Sauvignon grape.");
    assert!(made.warnings[0].starts_with("low seed count"));
    assert!(made.rankings.contains_key(&Method::Boot));

    let maker = &bundle.relations[":hasMaker"];
    assert!(maker.candidates.is_empty());
    assert!(maker.rankings[&Method::Sp].is_empty());

    let text = bundle.to_canonical_json().unwrap();
    assert_eq!(ResourceBundle::from_json(&text).unwrap(), bundle);
}

#[test]
fn runs_are_byte_identical() {
    let a = full_run(true).to_canonical_json().unwrap();
    let b = full_run(true).to_canonical_json().unwrap();
    assert_eq!(a, b);
}

#[test]
fn names_from_top_candidates_and_selections() {
    let (onto, _) = inputs();
    let mut bundle = full_run(false);
    let top = names_from_bundle(&onto, &bundle, None);
    let red = onto.entity_id(":red").unwrap();
    assert_eq!(top[&red], bundle.entities[":red"].candidates[0].name);
    let last = bundle.entities[":red"].candidates.len() - 1;
    bundle.record_selection(":red", Some(last), "j1", true, 0).unwrap();
    let selected = names_from_bundle(&onto, &bundle, Some("j1"));
    assert_eq!(selected.len(), 1);
    assert_eq!(selected[&red], bundle.entities[":red"].candidates[last].name);
}

