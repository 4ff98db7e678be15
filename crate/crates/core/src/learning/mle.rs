use super::score::node_columns;
use super::LearnError;
use crate::dataset::Dataset;
use crate::network::{BayesianNetwork, Cpt, Dag};

/// Fits every CPT of `dag` by (optionally smoothed) frequency counting.
///
/// Entry = `(n(v=l, pa=j) + alpha) / (n(pa=j) + alpha * |levels(v)|)`. With
/// `alpha = 0`, parent configurations never observed get a uniform row.
/// The DAG must list the schema variables in schema order.
pub fn fit_mle(dag: &Dag, dataset: &Dataset, alpha: f64) -> Result<BayesianNetwork, LearnError> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(LearnError::InvalidSmoothing(alpha));
    }
    if dataset.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    let schema = dataset.schema();
    let cols = node_columns(dag, dataset)?;
    let mut cpts = Vec::with_capacity(dag.len());
    for v in 0..dag.len() {
        let child = cols[v];
        let card = schema.cardinality(child);
        let parents: Vec<usize> = dag.parents(v).iter().map(|&p| cols[p]).collect();
        let parent_cards: Vec<usize> = parents.iter().map(|&p| schema.cardinality(p)).collect();
        let configs: usize = parent_cards.iter().product();

        let child_col = dataset.column(child).expect("checked by node_columns");
        let parent_cols: Vec<&[u8]> = parents
            .iter()
            .map(|&p| dataset.column(p).expect("checked by node_columns"))
            .collect();
        let mut counts = vec![0u64; configs * card];
        for (r, &lvl) in child_col.iter().enumerate() {
            let cfg = parent_cols
                .iter()
                .zip(&parent_cards)
                .fold(0usize, |acc, (col, c)| acc * c + col[r] as usize);
            counts[cfg * card + lvl as usize] += 1;
        }

        let rows = counts
            .chunks(card)
            .map(|row| {
                let total: u64 = row.iter().sum();
                let denom = total as f64 + alpha * card as f64;
                if denom == 0.0 {
                    vec![1.0 / card as f64; card]
                } else {
                    row.iter().map(|&n| (n as f64 + alpha) / denom).collect()
                }
            })
            .collect();
        let parent_spec = parents
            .iter()
            .zip(&parent_cards)
            .map(|(&p, &c)| (schema.question(p).abbr.clone(), c))
            .collect();
        cpts.push(Cpt::new(&dag.nodes()[v], card, parent_spec, rows)?);
    }
    Ok(BayesianNetwork::new(schema.clone(), dag.clone(), cpts)?)
}
