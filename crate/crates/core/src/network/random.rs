use rand::seq::index;
use rand::Rng as _;

use super::{BayesianNetwork, Cpt, Dag, NetworkError, QuestionSpec, Role, SurveySchema};
use crate::rng;

/// Shape limits for [`random_network`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomNetworkSpec {
    pub nodes: usize,
    pub min_levels: usize,
    pub max_levels: usize,
    pub max_parents: usize,
}

impl Default for RandomNetworkSpec {
    fn default() -> Self {
        RandomNetworkSpec {
            nodes: 6,
            min_levels: 2,
            max_levels: 4,
            max_parents: 3,
        }
    }
}

/// Random network over `X0..X{n-1}`, label `X{n-1}`. Parents are drawn from
/// lower-indexed nodes, so index order is topological. CPT rows are uniform
/// draws from the probability simplex.
pub fn random_network(spec: RandomNetworkSpec, seed: u64) -> Result<BayesianNetwork, NetworkError> {
    if spec.nodes == 0 {
        return Err(NetworkError::NoNodes);
    }
    if spec.min_levels < 2 || spec.max_levels < spec.min_levels || spec.max_levels > 255 {
        return Err(NetworkError::BadLevels {
            abbr: format!("{}..={}", spec.min_levels, spec.max_levels),
        });
    }
    let mut rng = rng::seeded(seed);
    let names: Vec<String> = (0..spec.nodes).map(|i| format!("X{i}")).collect();
    let cards: Vec<usize> = (0..spec.nodes)
        .map(|_| rng.gen_range(spec.min_levels..=spec.max_levels))
        .collect();
    let mut edges = Vec::new();
    let mut parents_of = Vec::with_capacity(spec.nodes);
    for child in 0..spec.nodes {
        let count = rng.gen_range(0..=spec.max_parents.min(child));
        let mut parents = index::sample(&mut rng, child, count).into_vec();
        parents.sort_unstable();
        edges.extend(parents.iter().map(|&p| (p, child)));
        parents_of.push(parents);
    }

    let questions = names
        .iter()
        .zip(&cards)
        .enumerate()
        .map(|(i, (name, &card))| {
            let levels: Vec<String> = (0..card).map(|l| l.to_string()).collect();
            let levels: Vec<&str> = levels.iter().map(String::as_str).collect();
            let role = if i + 1 == spec.nodes {
                Role::Label
            } else {
                Role::Asked
            };
            QuestionSpec::new(name, "", &levels, role)
        })
        .collect();
    let schema = SurveySchema::new(questions, &names[spec.nodes - 1])?;
    let dag = Dag::from_indices(names.clone(), &edges)?;
    let cpts = (0..spec.nodes)
        .map(|v| {
            let parents: Vec<(String, usize)> = dag
                .parents(v)
                .iter()
                .map(|&p| (names[p].clone(), cards[p]))
                .collect();
            let rows = parents.iter().map(|(_, c)| c).product::<usize>();
            let table = (0..rows)
                .map(|_| simplex_point(&mut rng, cards[v]))
                .collect();
            Cpt::new(&names[v], cards[v], parents, table)
        })
        .collect::<Result<Vec<_>, _>>()?;
    BayesianNetwork::new(schema, dag, cpts)
}

/// Normalized exponential draws: uniform on the simplex.
fn simplex_point(rng: &mut rng::Rng, card: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..card).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn respects_limits() {
        for seed in 0..30 {
            let spec = RandomNetworkSpec {
                nodes: 8,
                min_levels: 2,
                max_levels: 4,
                max_parents: 2,
            };
            let bn = random_network(spec, seed).unwrap();
            assert_eq!(bn.len(), 8);
            for v in 0..8 {
                assert!(bn.dag().parents(v).len() <= 2);
                assert!(bn.dag().parents(v).iter().all(|&p| p < v));
                assert!((2..=4).contains(&bn.schema().cardinality(v)));
            }
            assert_eq!(bn.schema().label_var(), "X7");
        }
    }

    #[test]
    fn deterministic_and_validated() {
        let spec = RandomNetworkSpec::default();
        assert_eq!(
            random_network(spec, 5).unwrap().to_json(),
            random_network(spec, 5).unwrap().to_json()
        );
        assert!(random_network(RandomNetworkSpec { nodes: 0, ..spec }, 1).is_err());
        assert!(random_network(
            RandomNetworkSpec {
                min_levels: 1,
                ..spec
            },
            1
        )
        .is_err());
    }
}
