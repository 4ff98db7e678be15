use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::LearnError;
use crate::dataset::Dataset;
use crate::network::Dag;

/// Penalized-likelihood network score. Larger is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// `LL - p`
    #[default]
    Aic,
    /// `LL - p ln(N) / 2`
    Bic,
}

impl Criterion {
    pub fn penalty_per_parameter(self, n_rows: usize) -> f64 {
        match self {
            Criterion::Aic => 1.0,
            Criterion::Bic => (n_rows as f64).ln() / 2.0,
        }
    }
}

impl FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(Criterion::Aic),
            "bic" => Ok(Criterion::Bic),
            other => Err(format!("unknown score `{other}` (expected aic or bic)")),
        }
    }
}

/// Log-likelihood and free-parameter count of one family, with the child's
/// CPT fitted by maximum likelihood. Columns are schema indices.
pub(crate) fn family_fit(dataset: &Dataset, child: usize, parents: &[usize]) -> (f64, usize) {
    let schema = dataset.schema();
    let card = schema.cardinality(child);
    let configs: usize = parents.iter().map(|&p| schema.cardinality(p)).product();
    let child_col = dataset.column(child).expect("child column present");
    let parent_cols: Vec<(&[u8], usize)> = parents
        .iter()
        .map(|&p| {
            (
                dataset.column(p).expect("parent column present"),
                schema.cardinality(p),
            )
        })
        .collect();

    let mut counts = vec![0u32; configs * card];
    for (r, &lvl) in child_col.iter().enumerate() {
        let cfg = parent_cols
            .iter()
            .fold(0usize, |acc, (col, c)| acc * c + col[r] as usize);
        counts[cfg * card + lvl as usize] += 1;
    }

    let mut ll = 0.0;
    for row in counts.chunks(card) {
        let total: u32 = row.iter().sum();
        if total == 0 {
            continue;
        }
        let total = total as f64;
        for &n in row {
            if n > 0 {
                let n = n as f64;
                ll += n * (n / total).ln();
            }
        }
    }
    (ll, (card - 1) * configs)
}

/// Score contribution of one family.
pub fn family_score(
    dataset: &Dataset,
    child: usize,
    parents: &[usize],
    criterion: Criterion,
) -> f64 {
    let (ll, params) = family_fit(dataset, child, parents);
    ll - criterion.penalty_per_parameter(dataset.len()) * params as f64
}

/// Dataset column index of every DAG node, matched by name.
pub(crate) fn node_columns(dag: &Dag, dataset: &Dataset) -> Result<Vec<usize>, LearnError> {
    dag.nodes()
        .iter()
        .map(|name| {
            dataset
                .schema()
                .index_of(name)
                .filter(|&i| dataset.column(i).is_some())
                .ok_or_else(|| LearnError::MissingColumn(name.clone()))
        })
        .collect()
}

fn families(dag: &Dag, dataset: &Dataset) -> Result<Vec<(usize, Vec<usize>)>, LearnError> {
    if dataset.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let cols = node_columns(dag, dataset)?;
    Ok((0..dag.len())
        .map(|v| (cols[v], dag.parents(v).iter().map(|&p| cols[p]).collect()))
        .collect())
}

/// Log-likelihood of `dataset` under `dag` with MLE parameters.
pub fn log_likelihood(dag: &Dag, dataset: &Dataset) -> Result<f64, LearnError> {
    Ok(families(dag, dataset)?
        .iter()
        .map(|(c, ps)| family_fit(dataset, *c, ps).0)
        .sum())
}

/// Number of free parameters of `dag` given the dataset's level counts.
pub fn parameter_count(dag: &Dag, dataset: &Dataset) -> Result<usize, LearnError> {
    let schema = dataset.schema();
    let cols = node_columns(dag, dataset)?;
    Ok((0..dag.len())
        .map(|v| {
            let rows: usize = dag
                .parents(v)
                .iter()
                .map(|&p| schema.cardinality(cols[p]))
                .product();
            (schema.cardinality(cols[v]) - 1) * rows
        })
        .sum())
}

pub fn score(dag: &Dag, dataset: &Dataset, criterion: Criterion) -> Result<f64, LearnError> {
    Ok(families(dag, dataset)?
        .iter()
        .map(|(c, ps)| family_score(dataset, *c, ps, criterion))
        .sum())
}
