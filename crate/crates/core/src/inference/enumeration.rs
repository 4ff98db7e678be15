use super::{check_query, Engine, InferenceError, Posterior};
use crate::network::{BayesianNetwork, Evidence};

/// Largest joint state space [`enumerate`] will walk.
pub const MAX_ENUMERATION_STATES: u64 = 1 << 24;

/// Brute-force `P(target | evidence)` summing the full joint over every
/// complete assignment. Only practical for small networks; meant as a
/// reference for the other engines.
pub fn enumerate(
    bn: &BayesianNetwork,
    target: usize,
    evidence: &Evidence,
) -> Result<Posterior, InferenceError> {
    check_query(bn, target, evidence)?;
    let cards = bn.schema().cardinalities();
    let states = cards
        .iter()
        .try_fold(1u64, |acc, &c| acc.checked_mul(c as u64))
        .filter(|&s| s <= MAX_ENUMERATION_STATES);
    if states.is_none() {
        return Err(InferenceError::StateSpaceTooLarge);
    }
    let observed = evidence.to_dense(cards.len());
    let mut acc = vec![0.0; cards[target]];
    let mut a: Vec<usize> = observed.iter().map(|o| o.unwrap_or(0)).collect();
    'outer: loop {
        acc[a[target]] += bn.joint_probability(&a)?;
        let mut pos = a.len();
        loop {
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
            if observed[pos].is_some() {
                continue;
            }
            a[pos] += 1;
            if a[pos] < cards[pos] {
                break;
            }
            a[pos] = 0;
        }
    }
    let total: f64 = acc.iter().sum();
    if total <= 0.0 {
        return Err(InferenceError::ZeroProbabilityEvidence);
    }
    let q = bn.schema().question(target);
    Ok(Posterior {
        variable: q.abbr.clone(),
        levels: q.levels.clone(),
        probs: acc.into_iter().map(|p| p / total).collect(),
        engine: Engine::Exact,
        effective_samples: f64::INFINITY,
    })
}
