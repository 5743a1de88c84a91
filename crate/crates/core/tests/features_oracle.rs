//! Counting features checked against a naive recount.

mod common;

use std::collections::BTreeSet;

use lexforge::features::{extraction_features, RelationContext, FEATURE_COUNT};
use lexforge::realize::Lexicon;

use common::{oracle_rows, setup};

#[test]
fn counting_features_match_recount() {
    let (store, ex) = setup();
    assert!(ex.plans.len() >= 3, "{} plans", ex.plans.len());
    let ctx = RelationContext::new(&store, Lexicon::shared(), &ex, vec!["made".into(), "from".into()]);
    let table = extraction_features(&ctx);
    let expected = oracle_rows(&store, &ex);
    assert_eq!(table.rows.len(), expected.len());
    for (row, want) in table.rows.iter().zip(&expected) {
        assert_eq!(row.len(), FEATURE_COUNT);
        for (j, w) in want.iter().enumerate() {
            assert!((row[j] - w).abs() < 1e-9, "feature {j}: {} vs {}", row[j], w);
        }
    }
}

#[test]
fn productivities_sum_to_one() {
    let (store, ex) = setup();
    let ctx = RelationContext::new(&store, Lexicon::shared(), &ex, vec!["made".into(), "from".into()]);
    let c = &ctx.counters;
    for v in [0, 3, 6, 7, 8, 17] {
        let keys: BTreeSet<_> = c.events.iter().map(|e| c.key(e, v)).collect();
        let sum: f64 = keys.iter().map(|k| c.productivity(v, k)).sum();
        assert!((sum - 1.0).abs() < 1e-12, "variant {v}: {sum}");
    }
}

#[test]
fn token_pmi_and_cosine_by_hand() {
    let (store, ex) = setup();
    let ctx = RelationContext::new(&store, Lexicon::shared(), &ex, vec!["made".into(), "from".into()]);
    // A single token against itself: joint equals marginal, so the score is 1.
    assert!((ctx.tokens.avg_tok_pmi(&["grapes"], &["grapes"]) - 1.0).abs() < 1e-12);

    // Four sentences; stems semillon, made, grape, wine, australia, often.
    let (l, v) = (4.0, 6.0);
    let p = |c: f64| (c + 1.0) / (l + v);
    let semillon = p(2.0);
    let grape = p(4.0);
    let joint = p(2.0);
    let npmi = (joint / (semillon * grape)).ln() / -joint.ln();
    let got = ctx.tokens.avg_tok_pmi(&["Semillon"], &["Semillon", "grapes"]);
    assert!((got - (1.0 + npmi) / 2.0).abs() < 1e-12, "{got}");

    // tf-idf cosine of "Semillon" and "Semillon grapes" over three documents.
    let idf = |df: f64| ((1.0 + 3.0) / (1.0 + df)).ln() + 1.0;
    let (ws, wg) = (idf(2.0), idf(3.0));
    let want = ws * ws / (ws * (ws * ws + wg * wg).sqrt());
    let idx = store.idf("g");
    let got = lexforge::text::cosine(&["Semillon"], &["Semillon", "grapes"], &idx);
    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
}
