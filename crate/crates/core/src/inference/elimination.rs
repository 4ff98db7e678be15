use std::collections::BTreeSet;

use super::factor::Factor;
use super::{check_query, Engine, InferenceError, Posterior};
use crate::network::{BayesianNetwork, Evidence};

/// Greedy min-degree order over the interaction graph of `factors`, restricted
/// to `hidden`. Ties go to the lowest variable index.
fn min_degree_order(n_vars: usize, factors: &[Factor], hidden: &[bool]) -> Vec<usize> {
    let mut adj = vec![BTreeSet::new(); n_vars];
    for f in factors {
        for &a in &f.vars {
            for &b in &f.vars {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    let mut remaining: BTreeSet<usize> = (0..n_vars).filter(|&v| hidden[v]).collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let next = *remaining
            .iter()
            .min_by_key(|&&v| (adj[v].len(), v))
            .expect("non-empty");
        remaining.remove(&next);
        let neighbours: Vec<usize> = adj[next].iter().copied().collect();
        for &a in &neighbours {
            adj[a].remove(&next);
            for &b in &neighbours {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        adj[next].clear();
        order.push(next);
    }
    order
}

/// Exact `P(target | evidence)` by variable elimination.
pub fn eliminate(
    bn: &BayesianNetwork,
    target: usize,
    evidence: &Evidence,
) -> Result<Posterior, InferenceError> {
    check_query(bn, target, evidence)?;
    let n = bn.len();
    let observed = evidence.to_dense(n);
    let relevant = bn
        .dag()
        .ancestral_set(std::iter::once(target).chain(evidence.variables()));

    let mut factors: Vec<Factor> = (0..n)
        .filter(|&v| relevant[v])
        .map(|v| Factor::from_cpt(bn, v, &observed))
        .collect();
    let hidden: Vec<bool> = (0..n)
        .map(|v| relevant[v] && v != target && observed[v].is_none())
        .collect();

    for var in min_degree_order(n, &factors, &hidden) {
        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.contains(&var));
        factors = rest;
        let merged = touching
            .iter()
            .fold(Factor::scalar(1.0), |acc, f| acc.product(f));
        factors.push(merged.sum_out(var));
    }

    let joint = factors
        .iter()
        .fold(Factor::scalar(1.0), |acc, f| acc.product(f));
    debug_assert_eq!(joint.vars, vec![target]);
    let total: f64 = joint.values.iter().sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(InferenceError::ZeroProbabilityEvidence);
    }
    let q = bn.schema().question(target);
    Ok(Posterior {
        variable: q.abbr.clone(),
        levels: q.levels.clone(),
        probs: joint.values.iter().map(|p| p / total).collect(),
        engine: Engine::Exact,
        effective_samples: f64::INFINITY,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::network::{Cpt, Dag, QuestionSpec, Role, SurveySchema};

    /// A -> B, A -> C, B -> D, C -> D with mixed cardinalities.
    fn diamond() -> BayesianNetwork {
        let schema = SurveySchema::new(
            vec![
                QuestionSpec::new("A", "", &["0", "1"], Role::Asked),
                QuestionSpec::new("B", "", &["0", "1", "2"], Role::Asked),
                QuestionSpec::new("C", "", &["0", "1"], Role::Asked),
                QuestionSpec::new("D", "", &["0", "1"], Role::Label),
            ],
            "D",
        )
        .unwrap();
        let dag = Dag::new(
            &["A", "B", "C", "D"],
            &[("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")],
        )
        .unwrap();
        let cpts = vec![
            Cpt::new("A", 2, vec![], vec![vec![0.3, 0.7]]).unwrap(),
            Cpt::new(
                "B",
                3,
                vec![("A".into(), 2)],
                vec![vec![0.2, 0.5, 0.3], vec![0.6, 0.1, 0.3]],
            )
            .unwrap(),
            Cpt::new(
                "C",
                2,
                vec![("A".into(), 2)],
                vec![vec![0.9, 0.1], vec![0.25, 0.75]],
            )
            .unwrap(),
            Cpt::new(
                "D",
                2,
                vec![("B".into(), 3), ("C".into(), 2)],
                vec![
                    vec![0.1, 0.9],
                    vec![0.8, 0.2],
                    vec![0.5, 0.5],
                    vec![0.35, 0.65],
                    vec![0.95, 0.05],
                    vec![0.4, 0.6],
                ],
            )
            .unwrap(),
        ];
        BayesianNetwork::new(schema, dag, cpts).unwrap()
    }

    #[test]
    fn root_prior() {
        let bn = diamond();
        let p = eliminate(&bn, 0, &Evidence::new()).unwrap();
        assert_eq!(p.probs, vec![0.3, 0.7]);
        assert!(p.effective_samples.is_infinite());
    }

    #[test]
    fn observed_parents_select_a_row() {
        let bn = diamond();
        let ev = Evidence::from_labels(bn.schema(), [("B", "1"), ("C", "1")]).unwrap();
        let p = eliminate(&bn, 3, &ev).unwrap();
        assert_abs_diff_eq!(p.probs[0], 0.35, epsilon = 1e-12);
    }

    #[test]
    fn matches_enumeration() {
        let bn = diamond();
        let cases = [
            (0, vec![("D", "1")]),
            (1, vec![("C", "1"), ("D", "0")]),
            (2, vec![("B", "2")]),
            (3, vec![]),
            (0, vec![("B", "0"), ("C", "1"), ("D", "1")]),
        ];
        for (target, ev) in cases {
            let ev = Evidence::from_labels(bn.schema(), ev).unwrap();
            let exact = eliminate(&bn, target, &ev).unwrap();
            for (a, b) in exact
                .probs
                .iter()
                .zip(crate::inference::enumerate(&bn, target, &ev).unwrap().probs)
            {
                assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn errors() {
        let bn = diamond();
        let ev = Evidence::from_labels(bn.schema(), [("A", "0")]).unwrap();
        assert!(matches!(
            eliminate(&bn, 0, &ev),
            Err(InferenceError::TargetInEvidence(_))
        ));
        assert!(matches!(
            eliminate(&bn, 9, &ev),
            Err(InferenceError::UnknownTarget(9))
        ));
    }

    #[test]
    fn impossible_evidence() {
        let bn = crate::network::bn::tests::two_node();
        // P(B=0 | A=0) = 0 and A=0 is fixed
        let ev = Evidence::from_labels(bn.schema(), [("A", "0"), ("B", "0")]).unwrap();
        let err = {
            let schema = bn.schema().clone();
            let mut qs = schema.questions().to_vec();
            qs.push(QuestionSpec::new("Z", "", &["0", "1"], Role::Asked));
            let schema = SurveySchema::new(qs, "B").unwrap();
            let dag = Dag::new(&["A", "B", "Z"], &[("A", "B")]).unwrap();
            let mut cpts = bn.cpts().to_vec();
            cpts.push(Cpt::new("Z", 2, vec![], vec![vec![0.5, 0.5]]).unwrap());
            let bigger = BayesianNetwork::new(schema, dag, cpts).unwrap();
            eliminate(&bigger, 2, &ev).unwrap_err()
        };
        assert_eq!(err, InferenceError::ZeroProbabilityEvidence);
    }
}
