use proptest::prelude::*;

use lexforge::maxent::{information_gain, train, Instance, TrainConfig};
use lexforge::nlname::{levenshtein, normalized_distance};
use lexforge::ranker::{bootstrap_conf, rank_sp, rank_sp_star, RERANK_DEPTH};

fn labeled(rows: &[(Vec<f64>, bool)]) -> Vec<Instance> {
    rows.iter()
        .enumerate()
        .map(|(i, (x, y))| Instance::new(x.clone(), *y, format!("r{i}")))
        .collect()
}

fn rows() -> impl Strategy<Value = Vec<(Vec<f64>, bool)>> {
    prop::collection::vec((prop::collection::vec(0.0..1.0f64, 3), any::<bool>()), 4..16)
        .prop_filter("both classes", |r| r.iter().any(|x| x.1) && r.iter().any(|x| !x.1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sp_star_keeps_the_tail(
        probs in prop::collection::vec(0.0..1.0f64, 1..30),
        cover in prop::collection::vec(0.0..1.0f64, 30),
    ) {
        let sp = rank_sp(":r", &probs);
        let star = rank_sp_star(&sp, |id| cover[id]);
        prop_assert_eq!(star.candidates.len(), sp.candidates.len());
        let depth = RERANK_DEPTH.min(probs.len());
        prop_assert_eq!(&star.candidates[depth..], &sp.candidates[depth..]);
        let mut head: Vec<usize> = star.candidates[..depth].iter().map(|c| c.id).collect();
        let mut before: Vec<usize> = sp.candidates[..depth].iter().map(|c| c.id).collect();
        head.sort_unstable();
        before.sort_unstable();
        prop_assert_eq!(head, before);
        for w in star.candidates[..depth].windows(2) {
            prop_assert!(w[0].score >= w[1].score);
        }
    }

    #[test]
    fn edit_distance_is_a_bounded_metric(a in "[a-zA-Z]{0,12}", b in "[a-zA-Z]{0,12}") {
        prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &a.to_uppercase()), 0);
        let d = normalized_distance(&a, &b);
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn conf_is_zero_without_support(hits in 0usize..50, misses in 0usize..50, finds in 0usize..50) {
        let c = bootstrap_conf(hits, misses, finds);
        prop_assert!(c >= 0.0);
        if hits == 0 || finds <= 1 {
            prop_assert_eq!(c, 0.0);
        }
    }

    #[test]
    fn duplicating_every_instance_keeps_the_model(rows in rows()) {
        let once = labeled(&rows);
        let twice: Vec<Instance> = once.iter().chain(&once).cloned().collect();
        let config = TrainConfig { l2: 0.1, ..TrainConfig::default() };
        let a = train(&once, &config).unwrap();
        let b = train(&twice, &config).unwrap();
        for (x, y) in a.weights.iter().zip(&b.weights) {
            prop_assert!((x - y).abs() < 1e-6, "{} vs {}", x, y);
        }
        prop_assert_eq!(information_gain(&once).unwrap(), information_gain(&twice).unwrap());
    }

    #[test]
    fn training_is_deterministic(rows in rows()) {
        let data = labeled(&rows);
        let a = train(&data, &TrainConfig::default()).unwrap();
        let b = train(&data, &TrainConfig::default()).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
    }
}
