//! Conditional-probability queries with partial evidence.
//!
//! [`eliminate`] is exact variable elimination; [`lw_query`] is likelihood
//! weighting. Both drop variables that are not ancestors of the target or the
//! evidence before doing any work, since those sum out to one.

mod elimination;
mod enumeration;
mod factor;
mod sampling;

pub use elimination::eliminate;
pub use enumeration::{enumerate, MAX_ENUMERATION_STATES};
pub use sampling::{forward_sample, lw_query};

use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::network::{BayesianNetwork, Evidence, NetworkError};

pub const DEFAULT_SAMPLES: usize = 5000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("target `{0}` is part of the evidence")]
    TargetInEvidence(String),
    #[error("target index {0} is not a network variable")]
    UnknownTarget(usize),
    #[error("evidence has probability zero under the network")]
    ZeroProbabilityEvidence,
    #[error("every sample had weight zero; evidence is impossible or too few samples were drawn")]
    AllZeroWeights,
    #[error("conflicting answers for `{variable}`")]
    ConflictingEvidence { variable: String },
    #[error("joint state space is too large to enumerate")]
    StateSpaceTooLarge,
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Engine {
    Exact,
    LikelihoodWeighting,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Exact => "exact",
            Engine::LikelihoodWeighting => "lw",
        })
    }
}

impl FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" | "ve" => Ok(Engine::Exact),
            "lw" | "likelihood-weighting" | "likelihoodweighting" => {
                Ok(Engine::LikelihoodWeighting)
            }
            other => Err(format!("unknown engine `{other}` (expected exact or lw)")),
        }
    }
}

/// Distribution over the levels of one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub variable: String,
    pub levels: Vec<String>,
    pub probs: Vec<f64>,
    pub engine: Engine,
    /// `(sum w)^2 / sum w^2` for sampled posteriors, infinity for exact ones.
    pub effective_samples: f64,
}

impl Posterior {
    /// Most probable level; ties go to the lowest level index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }

    pub fn argmax_label(&self) -> &str {
        &self.levels[self.argmax()]
    }

    pub fn prob(&self, level: &str) -> Option<f64> {
        self.levels
            .iter()
            .position(|l| l == level)
            .map(|i| self.probs[i])
    }

    /// Total-variation distance to another posterior over the same levels.
    pub fn total_variation(&self, other: &Posterior) -> f64 {
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    pub fn is_exact(&self) -> bool {
        self.engine == Engine::Exact
    }
}

struct ProbMap<'a>(&'a Posterior);

impl Serialize for ProbMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.levels.len()))?;
        for (l, p) in self.0.levels.iter().zip(&self.0.probs) {
            map.serialize_entry(l, p)?;
        }
        map.end()
    }
}

impl Serialize for Posterior {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("variable", &self.variable)?;
        map.serialize_entry("probs", &ProbMap(self))?;
        map.serialize_entry("engine", &self.engine)?;
        if self.effective_samples.is_finite() {
            map.serialize_entry("effectiveSamples", &self.effective_samples)?;
        } else {
            map.serialize_entry("effectiveSamples", "exact")?;
        }
        map.end()
    }
}

impl Posterior {
    /// The level → probability map alone, as JSON.
    pub fn probs_json(&self) -> serde_json::Value {
        serde_json::to_value(ProbMap(self)).expect("probabilities serialize")
    }
}

pub(crate) fn check_query(
    bn: &BayesianNetwork,
    target: usize,
    evidence: &Evidence,
) -> Result<(), InferenceError> {
    if target >= bn.len() {
        return Err(InferenceError::UnknownTarget(target));
    }
    if evidence.contains(target) {
        return Err(InferenceError::TargetInEvidence(
            bn.schema().question(target).abbr.clone(),
        ));
    }
    for (v, l) in evidence.iter() {
        if v >= bn.len() {
            return Err(NetworkError::UnknownVariable(format!("#{v}")).into());
        }
        if l >= bn.schema().cardinality(v) {
            return Err(NetworkError::InvalidLevel {
                variable: bn.schema().question(v).abbr.clone(),
                level: l,
            }
            .into());
        }
    }
    Ok(())
}

/// Runs the chosen engine. `n_samples` and `seed` only matter for sampling.
pub fn query(
    bn: &BayesianNetwork,
    target: usize,
    evidence: &Evidence,
    engine: Engine,
    n_samples: usize,
    seed: u64,
) -> Result<Posterior, InferenceError> {
    match engine {
        Engine::Exact => eliminate(bn, target, evidence),
        Engine::LikelihoodWeighting => lw_query(bn, target, evidence, n_samples, seed),
    }
}

/// Most probable level of `target` given the evidence.
pub fn predict(
    bn: &BayesianNetwork,
    target: usize,
    evidence: &Evidence,
    engine: Engine,
    n_samples: usize,
    seed: u64,
) -> Result<usize, InferenceError> {
    Ok(query(bn, target, evidence, engine, n_samples, seed)?.argmax())
}

/// Union of two answer sets; fails if a variable has two different levels.
pub fn merge_evidence(
    bn: &BayesianNetwork,
    prior: &Evidence,
    new_answers: &Evidence,
) -> Result<Evidence, InferenceError> {
    let mut merged = prior.clone();
    for (v, l) in new_answers.iter() {
        if let Some(old) = merged.insert(v, l) {
            if old != l {
                let variable = if v < bn.len() {
                    bn.schema().question(v).abbr.clone()
                } else {
                    format!("#{v}")
                };
                return Err(InferenceError::ConflictingEvidence { variable });
            }
        }
    }
    Ok(merged)
}

/// Re-queries with `prior_evidence` plus `new_answers`. The network is static,
/// so this equals a fresh query on the merged evidence.
pub fn incremental_update(
    bn: &BayesianNetwork,
    target: usize,
    prior_evidence: &Evidence,
    new_answers: &Evidence,
    engine: Engine,
    n_samples: usize,
    seed: u64,
) -> Result<Posterior, InferenceError> {
    let merged = merge_evidence(bn, prior_evidence, new_answers)?;
    query(bn, target, &merged, engine, n_samples, seed)
}
