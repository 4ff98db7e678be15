use askless_core::inference::{
    eliminate, enumerate, incremental_update, lw_query, merge_evidence, query,
};
use askless_core::network::{random_network, RandomNetworkSpec};
use askless_core::rng;
use askless_core::{BayesianNetwork, Engine, Evidence, InferenceError};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn spec(nodes: usize) -> RandomNetworkSpec {
    RandomNetworkSpec {
        nodes,
        min_levels: 2,
        max_levels: 4,
        max_parents: 3,
    }
}

fn all_assignments(cards: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &c in cards {
        out = out
            .into_iter()
            .flat_map(|a| {
                (0..c).map(move |l| {
                    let mut b = a.clone();
                    b.push(l);
                    b
                })
            })
            .collect();
    }
    out
}

fn random_evidence(bn: &BayesianNetwork, target: usize, rng: &mut rng::Rng) -> Evidence {
    let n = bn.len();
    let mut vars: Vec<usize> = (0..n).filter(|&v| v != target).collect();
    vars.shuffle(rng);
    let k = rng.gen_range(0..vars.len() + 1);
    let pairs: Vec<(usize, usize)> = vars[..k]
        .iter()
        .map(|&v| (v, rng.gen_range(0..bn.schema().cardinality(v))))
        .collect();
    Evidence::from_indices(bn.schema(), pairs).unwrap()
}

fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

#[test]
fn joint_sums_to_one_and_marginalizes() {
    for seed in 0..10 {
        let bn = random_network(spec(6), seed).unwrap();
        let cards = bn.schema().cardinalities();
        let assignments = all_assignments(&cards);
        let total: f64 = assignments
            .iter()
            .map(|a| bn.joint_probability(a).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12, "seed {seed}: {total}");

        // summing out the last variable of a root's marginal
        let root = 0;
        let mut marginal = vec![0.0; cards[root]];
        for a in &assignments {
            marginal[a[root]] += bn.joint_probability(a).unwrap();
        }
        assert!(tv(&marginal, bn.cpt(root).row(0)) < 1e-12);
    }
}

#[test]
fn elimination_matches_enumeration_on_random_networks() {
    let mut rng = rng::seeded(77);
    for seed in 0..20 {
        let bn = random_network(spec(7), seed).unwrap();
        for _ in 0..20 {
            let target = rng.gen_range(0..bn.len());
            let ev = random_evidence(&bn, target, &mut rng);
            match (eliminate(&bn, target, &ev), enumerate(&bn, target, &ev)) {
                (Ok(a), Ok(b)) => assert!(tv(&a.probs, &b.probs) < 1e-9),
                (Err(a), Err(b)) => assert_eq!(a, b),
                (a, b) => panic!("engines disagree: {a:?} vs {b:?}"),
            }
        }
    }
}

#[test]
fn lw_converges_and_is_seeded() {
    let bn = random_network(spec(6), 3).unwrap();
    let target = bn.len() - 1;
    let ev = Evidence::from_indices(bn.schema(), [(0, 0)]).unwrap();
    let exact = eliminate(&bn, target, &ev).unwrap();
    let approx = lw_query(&bn, target, &ev, 100_000, 11).unwrap();
    assert!(tv(&exact.probs, &approx.probs) < 0.02);
    assert_eq!(approx, lw_query(&bn, target, &ev, 100_000, 11).unwrap());
    assert!(approx.effective_samples > 0.0 && approx.effective_samples <= 100_000.0 * (1.0 + 1e-9));
}

#[test]
fn zero_probability_evidence_is_reported_by_both_engines() {
    let bn = BayesianNetwork::from_json(
        r#"{"schema":{"labelVar":"C","questions":[
            {"abbr":"A","text":"","levels":["0","1"],"role":"asked"},
            {"abbr":"B","text":"","levels":["0","1"],"role":"asked"},
            {"abbr":"C","text":"","levels":["0","1"],"role":"label"}]},
          "nodes":[
            {"name":"A","levels":["0","1"],"parents":[],"cptRows":[[1.0,0.0]]},
            {"name":"B","levels":["0","1"],"parents":[],"cptRows":[[0.5,0.5]]},
            {"name":"C","levels":["0","1"],"parents":["A"],"cptRows":[[0.3,0.7],[0.6,0.4]]}]}"#,
    )
    .unwrap();
    let ev = Evidence::from_labels(bn.schema(), [("A", "1")]).unwrap();
    assert_eq!(
        eliminate(&bn, 2, &ev).unwrap_err(),
        InferenceError::ZeroProbabilityEvidence
    );
    assert_eq!(
        lw_query(&bn, 2, &ev, 500, 1).unwrap_err(),
        InferenceError::AllZeroWeights
    );
    // B is irrelevant to C and must not change the answer
    let ev = Evidence::from_labels(bn.schema(), [("B", "1")]).unwrap();
    assert_eq!(eliminate(&bn, 2, &ev).unwrap().probs, vec![0.3, 0.7]);
}

#[test]
fn merge_rejects_conflicts() {
    let bn = random_network(spec(4), 1).unwrap();
    let a = Evidence::from_indices(bn.schema(), [(0, 0)]).unwrap();
    let b = Evidence::from_indices(bn.schema(), [(0, 1)]).unwrap();
    assert!(matches!(
        merge_evidence(&bn, &a, &b),
        Err(InferenceError::ConflictingEvidence { .. })
    ));
    assert_eq!(merge_evidence(&bn, &a, &a).unwrap(), a);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn incremental_equals_batch(seed in 0u64..1000, order_seed in 0u64..1000) {
        let bn = random_network(spec(6), seed).unwrap();
        let target = bn.len() - 1;
        let mut rng = rng::seeded(order_seed);
        let ev = random_evidence(&bn, target, &mut rng);
        let batch = query(&bn, target, &ev, Engine::Exact, 1, 0);
        let mut pairs: Vec<(usize, usize)> = ev.iter().collect();
        pairs.shuffle(&mut rng);
        let mut acc = Evidence::new();
        let mut last = query(&bn, target, &acc, Engine::Exact, 1, 0);
        for p in pairs {
            let one = Evidence::from_indices(bn.schema(), [p]).unwrap();
            last = incremental_update(&bn, target, &acc, &one, Engine::Exact, 1, 0);
            acc = merge_evidence(&bn, &acc, &one).unwrap();
        }
        match (batch, last) {
            (Ok(a), Ok(b)) => prop_assert!(tv(&a.probs, &b.probs) < 1e-9),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn posteriors_are_distributions(seed in 0u64..1000, q in 0u64..1000) {
        let bn = random_network(spec(5), seed).unwrap();
        let mut rng = rng::seeded(q);
        let target = rng.gen_range(0..bn.len());
        let ev = random_evidence(&bn, target, &mut rng);
        if let Ok(p) = eliminate(&bn, target, &ev) {
            prop_assert!((p.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(p.probs.iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)));
        }
    }
}
