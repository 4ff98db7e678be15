use std::collections::BTreeMap;

use super::{Cpt, Dag, NetworkError, SurveySchema};

/// A partial assignment: variable index to level index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Evidence(BTreeMap<usize, usize>);

impl Evidence {
    pub fn new() -> Self {
        Evidence::default()
    }

    /// Builds evidence from `(abbr, level label)` pairs, validating both.
    pub fn from_labels<'a, I>(schema: &SurveySchema, pairs: I) -> Result<Self, NetworkError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut out = BTreeMap::new();
        for (abbr, level) in pairs {
            let (var, lvl) = schema.resolve(abbr, level)?;
            out.insert(var, lvl);
        }
        Ok(Evidence(out))
    }

    /// Builds evidence from index pairs, validating ranges against `schema`.
    pub fn from_indices<I>(schema: &SurveySchema, pairs: I) -> Result<Self, NetworkError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut out = BTreeMap::new();
        for (var, lvl) in pairs {
            if var >= schema.len() {
                return Err(NetworkError::UnknownVariable(format!("#{var}")));
            }
            if lvl >= schema.cardinality(var) {
                return Err(NetworkError::InvalidLevel {
                    variable: schema.question(var).abbr.clone(),
                    level: lvl,
                });
            }
            out.insert(var, lvl);
        }
        Ok(Evidence(out))
    }

    pub fn get(&self, var: usize) -> Option<usize> {
        self.0.get(&var).copied()
    }

    pub fn contains(&self, var: usize) -> bool {
        self.0.contains_key(&var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().map(|(&v, &l)| (v, l))
    }

    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    /// Inserts without validation; returns the previous level if any.
    pub(crate) fn insert(&mut self, var: usize, level: usize) -> Option<usize> {
        self.0.insert(var, level)
    }

    /// Dense view with one slot per schema variable.
    pub fn to_dense(&self, n_vars: usize) -> Vec<Option<usize>> {
        let mut dense = vec![None; n_vars];
        for (v, l) in self.iter() {
            dense[v] = Some(l);
        }
        dense
    }

    pub fn to_labels(&self, schema: &SurveySchema) -> BTreeMap<String, String> {
        self.iter()
            .map(|(v, l)| {
                let q = schema.question(v);
                (q.abbr.clone(), q.levels[l].clone())
            })
            .collect()
    }
}

/// A schema, a DAG over its variables (in schema order) and one CPT per node.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesianNetwork {
    schema: SurveySchema,
    dag: Dag,
    cpts: Vec<Cpt>,
}

impl BayesianNetwork {
    pub fn new(schema: SurveySchema, dag: Dag, cpts: Vec<Cpt>) -> Result<Self, NetworkError> {
        let names = schema.names();
        if dag.nodes() != names.as_slice() {
            return Err(NetworkError::NodeMismatch(
                "DAG nodes must be the schema variables in schema order".into(),
            ));
        }
        if cpts.len() != names.len() {
            return Err(NetworkError::NodeMismatch(format!(
                "{} CPTs for {} nodes",
                cpts.len(),
                names.len()
            )));
        }
        for (v, cpt) in cpts.iter().enumerate() {
            if cpt.variable() != names[v] {
                return Err(NetworkError::NodeMismatch(format!(
                    "CPT #{v} is for `{}`, expected `{}`",
                    cpt.variable(),
                    names[v]
                )));
            }
            let parent_names: Vec<&str> =
                dag.parents(v).iter().map(|&p| names[p].as_str()).collect();
            if cpt.parents() != parent_names.as_slice() {
                return Err(NetworkError::NodeMismatch(format!(
                    "CPT parents of `{}` differ from the DAG",
                    names[v]
                )));
            }
            if cpt.cardinality() != schema.cardinality(v) {
                return Err(NetworkError::NodeMismatch(format!(
                    "CPT of `{}` has {} columns, schema has {} levels",
                    names[v],
                    cpt.cardinality(),
                    schema.cardinality(v)
                )));
            }
            for (&p, &card) in dag.parents(v).iter().zip(cpt.parent_cardinalities()) {
                if card != schema.cardinality(p) {
                    return Err(NetworkError::NodeMismatch(format!(
                        "CPT of `{}` assumes {card} levels for parent `{}`",
                        names[v], names[p]
                    )));
                }
            }
        }
        Ok(BayesianNetwork { schema, dag, cpts })
    }

    pub fn schema(&self) -> &SurveySchema {
        &self.schema
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn cpt(&self, var: usize) -> &Cpt {
        &self.cpts[var]
    }

    pub fn len(&self) -> usize {
        self.cpts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cpts.is_empty()
    }

    pub fn free_parameters(&self) -> usize {
        self.cpts.iter().map(Cpt::free_parameters).sum()
    }

    /// CPT row of `var` selected by the parent levels in `assignment`.
    #[inline]
    pub(crate) fn row_for(&self, var: usize, assignment: &[usize]) -> usize {
        self.cpts[var].row_index_unchecked(self.dag.parents(var).iter().map(|&p| assignment[p]))
    }

    /// Product of the CPT entries selected by a complete assignment.
    pub fn joint_probability(&self, assignment: &[usize]) -> Result<f64, NetworkError> {
        if assignment.len() != self.len() {
            return Err(NetworkError::IncompleteAssignment {
                expected: self.len(),
                got: assignment.len(),
            });
        }
        for (v, &lvl) in assignment.iter().enumerate() {
            if lvl >= self.schema.cardinality(v) {
                return Err(NetworkError::InvalidLevel {
                    variable: self.schema.question(v).abbr.clone(),
                    level: lvl,
                });
            }
        }
        let mut p = 1.0;
        for v in 0..self.len() {
            p *= self.cpts[v].probability(self.row_for(v, assignment), assignment[v]);
            if p == 0.0 {
                break;
            }
        }
        Ok(p)
    }

    /// Joint probability of a complete assignment given as a dense evidence
    /// view; `IncompleteAssignment` when any slot is empty.
    pub fn joint_probability_of(&self, evidence: &Evidence) -> Result<f64, NetworkError> {
        let dense = evidence.to_dense(self.len());
        let full: Option<Vec<usize>> = dense.into_iter().collect();
        match full {
            Some(a) => self.joint_probability(&a),
            None => Err(NetworkError::IncompleteAssignment {
                expected: self.len(),
                got: evidence.len(),
            }),
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::network::{QuestionSpec, Role};

    /// `A -> B`, binary, with P(A=1)=0.6 and P(B=1|A=1)=0.5.
    pub(crate) fn two_node() -> BayesianNetwork {
        let schema = SurveySchema::new(
            vec![
                QuestionSpec::new("A", "", &["0", "1"], Role::Asked),
                QuestionSpec::new("B", "", &["0", "1"], Role::Label),
            ],
            "B",
        )
        .unwrap();
        let dag = Dag::new(&["A", "B"], &[("A", "B")]).unwrap();
        let cpts = vec![
            Cpt::new("A", 2, vec![], vec![vec![0.4, 0.6]]).unwrap(),
            Cpt::new(
                "B",
                2,
                vec![("A".into(), 2)],
                vec![vec![0.0, 1.0], vec![0.5, 0.5]],
            )
            .unwrap(),
        ];
        BayesianNetwork::new(schema, dag, cpts).unwrap()
    }

    #[test]
    fn joint_is_product_of_entries() {
        let bn = two_node();
        assert_abs_diff_eq!(
            bn.joint_probability(&[1, 1]).unwrap(),
            0.30,
            epsilon = 1e-12
        );
        assert_eq!(bn.joint_probability(&[0, 0]).unwrap(), 0.0);
        let total: f64 = [[0, 0], [0, 1], [1, 0], [1, 1]]
            .iter()
            .map(|a| bn.joint_probability(a).unwrap())
            .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fair_independent_pair() {
        let schema = SurveySchema::new(
            vec![
                QuestionSpec::new("A", "", &["0", "1"], Role::Asked),
                QuestionSpec::new("B", "", &["0", "1"], Role::Label),
            ],
            "B",
        )
        .unwrap();
        let dag = Dag::new::<&str>(&["A", "B"], &[]).unwrap();
        let fair = |n: &str| Cpt::new(n, 2, vec![], vec![vec![0.5, 0.5]]).unwrap();
        let bn = BayesianNetwork::new(schema, dag, vec![fair("A"), fair("B")]).unwrap();
        for a in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            assert_abs_diff_eq!(bn.joint_probability(&a).unwrap(), 0.25);
        }
    }

    #[test]
    fn incomplete_assignment() {
        let bn = two_node();
        assert!(matches!(
            bn.joint_probability(&[1]),
            Err(NetworkError::IncompleteAssignment {
                expected: 2,
                got: 1
            })
        ));
        let ev = Evidence::from_labels(bn.schema(), [("A", "1")]).unwrap();
        assert!(bn.joint_probability_of(&ev).is_err());
    }

    #[test]
    fn evidence_validation() {
        let bn = two_node();
        assert!(matches!(
            Evidence::from_labels(bn.schema(), [("A", "7")]),
            Err(NetworkError::UnknownLevel { .. })
        ));
        assert!(matches!(
            Evidence::from_labels(bn.schema(), [("Z", "1")]),
            Err(NetworkError::UnknownVariable(_))
        ));
        let ev = Evidence::from_labels(bn.schema(), [("B", "0"), ("A", "1")]).unwrap();
        assert_eq!(ev.iter().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        assert_eq!(ev.to_labels(bn.schema())["A"], "1");
    }

    #[test]
    fn rejects_mismatched_cpt_parents() {
        let bn = two_node();
        let dag = Dag::new::<&str>(&["A", "B"], &[]).unwrap();
        let err = BayesianNetwork::new(bn.schema().clone(), dag, bn.cpts().to_vec()).unwrap_err();
        assert!(matches!(err, NetworkError::NodeMismatch(_)));
    }
}
