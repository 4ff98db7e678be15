use rand::Rng as _;

use super::{check_query, Engine, InferenceError, Posterior};
use crate::dataset::Dataset;
use crate::network::{BayesianNetwork, Evidence};
use crate::rng;

#[inline]
fn sample_level(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the final cumulative sum
    row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
}

/// Likelihood weighting: evidence nodes are clamped and contribute their CPT
/// probability to the sample weight, all other relevant nodes are sampled in
/// topological order.
pub fn lw_query(
    bn: &BayesianNetwork,
    target: usize,
    evidence: &Evidence,
    n_samples: usize,
    seed: u64,
) -> Result<Posterior, InferenceError> {
    check_query(bn, target, evidence)?;
    if n_samples == 0 {
        return Err(InferenceError::NoSamples);
    }
    let n = bn.len();
    let observed = evidence.to_dense(n);
    let relevant = bn
        .dag()
        .ancestral_set(std::iter::once(target).chain(evidence.variables()));
    let order: Vec<usize> = bn
        .dag()
        .topological_order()
        .into_iter()
        .filter(|&v| relevant[v])
        .collect();

    let mut rng = rng::seeded(seed);
    let card = bn.schema().cardinality(target);
    let mut acc = vec![0.0; card];
    let (mut sum_w, mut sum_w2) = (0.0f64, 0.0f64);
    let mut state: Vec<usize> = observed.iter().map(|o| o.unwrap_or(0)).collect();

    for _ in 0..n_samples {
        let mut w = 1.0;
        for &v in &order {
            let cpt = bn.cpt(v);
            let row = bn.row_for(v, &state);
            match observed[v] {
                Some(l) => {
                    w *= cpt.probability(row, l);
                    if w == 0.0 {
                        break;
                    }
                }
                None => {
                    let u: f64 = rng.gen();
                    state[v] = sample_level(cpt.row(row), u);
                }
            }
        }
        if w > 0.0 {
            acc[state[target]] += w;
            sum_w += w;
            sum_w2 += w * w;
        }
    }
    if sum_w <= 0.0 {
        return Err(InferenceError::AllZeroWeights);
    }
    let q = bn.schema().question(target);
    Ok(Posterior {
        variable: q.abbr.clone(),
        levels: q.levels.clone(),
        probs: acc.into_iter().map(|a| a / sum_w).collect(),
        engine: Engine::LikelihoodWeighting,
        effective_samples: sum_w * sum_w / sum_w2,
    })
}

/// Draws `rows` complete assignments by ancestral sampling.
pub fn forward_sample(bn: &BayesianNetwork, rows: usize, seed: u64) -> Dataset {
    let order = bn.dag().topological_order();
    let mut rng = rng::seeded(seed);
    let mut state = vec![0usize; bn.len()];
    let mut columns: Vec<Vec<u8>> = vec![Vec::with_capacity(rows); bn.len()];
    for _ in 0..rows {
        for &v in &order {
            let row = bn.row_for(v, &state);
            state[v] = sample_level(bn.cpt(v).row(row), rng.gen());
        }
        for (col, &l) in columns.iter_mut().zip(&state) {
            col.push(l as u8);
        }
    }
    Dataset::from_columns(bn.schema().clone(), columns.into_iter().map(Some).collect())
        .expect("sampled levels are in range")
}
