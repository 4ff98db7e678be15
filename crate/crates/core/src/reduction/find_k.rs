use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{evaluate, EvaluationReport};
use super::ReductionError;
use crate::dataset::Dataset;
use crate::inference::{predict, Engine, DEFAULT_SAMPLES};
use crate::network::{BayesianNetwork, Evidence, Role, SurveySchema};
use crate::rng;

/// Draws `k` distinct items uniformly at random, in draw order.
pub fn random_subset<T: Clone>(
    pool: &[T],
    k: usize,
    rng: &mut rng::Rng,
) -> Result<Vec<T>, ReductionError> {
    if k > pool.len() {
        return Err(ReductionError::KTooLarge {
            k,
            pool: pool.len(),
        });
    }
    Ok(index::sample(rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i].clone())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SelectionMode {
    /// Smallest k whose score reaches the threshold.
    #[default]
    Threshold,
    /// k with the highest score; ties go to the smaller k.
    Best,
}

impl FromStr for SelectionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "threshold" => Ok(SelectionMode::Threshold),
            "best" => Ok(SelectionMode::Best),
            other => Err(format!(
                "unknown mode `{other}` (expected threshold or best)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FindKConfig {
    pub grid: Vec<usize>,
    pub threshold: f64,
    pub mode: SelectionMode,
    /// Askable questions; the label and derived variables are not allowed.
    pub question_pool: Vec<String>,
    pub engine: Engine,
    pub n_samples: usize,
    pub seed: u64,
}

impl FindKConfig {
    /// Grid {5, 10, 15, 20}, threshold 0.70, every asked question in the pool,
    /// likelihood weighting with 5000 samples.
    pub fn for_schema(schema: &SurveySchema) -> Self {
        FindKConfig {
            grid: vec![5, 10, 15, 20],
            threshold: 0.70,
            mode: SelectionMode::Threshold,
            question_pool: schema
                .asked_indices()
                .into_iter()
                .map(|i| schema.question(i).abbr.clone())
                .collect(),
            engine: Engine::LikelihoodWeighting,
            n_samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }

    fn check_grid(&self) -> Result<(), ReductionError> {
        let bad = |m: String| Err(ReductionError::InvalidConfig(m));
        if self.grid.is_empty() {
            return bad("grid is empty".into());
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("grid must be strictly ascending".into());
        }
        if let Some(&k) = self
            .grid
            .iter()
            .find(|&&k| k == 0 || k > self.question_pool.len())
        {
            return bad(format!(
                "k={k} is outside [1, {}]",
                self.question_pool.len()
            ));
        }
        if !(self.threshold > 0.0 && self.threshold <= 1.0) {
            return bad(format!("threshold {} outside (0, 1]", self.threshold));
        }
        Ok(())
    }

    /// Checks the configuration and resolves the pool to variable indices.
    pub fn validate(&self, schema: &SurveySchema) -> Result<Vec<usize>, ReductionError> {
        self.check_grid()?;
        if self.n_samples == 0 {
            return Err(ReductionError::InvalidConfig(
                "nSamples must be at least 1".into(),
            ));
        }
        let mut pool = Vec::with_capacity(self.question_pool.len());
        for abbr in &self.question_pool {
            let v = schema.index_of(abbr).ok_or_else(|| {
                ReductionError::InvalidConfig(format!("unknown question `{abbr}`"))
            })?;
            if schema.question(v).role != Role::Asked {
                return Err(ReductionError::InvalidConfig(format!(
                    "`{abbr}` is not an asked question"
                )));
            }
            if pool.contains(&v) {
                return Err(ReductionError::InvalidConfig(format!(
                    "`{abbr}` is listed twice"
                )));
            }
            pool.push(v);
        }
        Ok(pool)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FindKReport {
    pub grid: Vec<usize>,
    pub per_k: BTreeMap<usize, EvaluationReport>,
    pub chosen_k: Option<usize>,
    pub mode: SelectionMode,
    pub threshold: f64,
    /// Which selection rule fired and why.
    pub decision: String,
}

impl FindKReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        for (k, report) in &self.per_k {
            out.push_str(&report.render_table(&format!("Accuracy metrics for k={k}")));
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{:<6}{:>12}{:>12}{:>12}{:>12}",
            "k", "Precision", "Recall", "Average F", "Macro F"
        );
        for (k, r) in &self.per_k {
            let _ = writeln!(
                out,
                "{:<6}{:>12.4}{:>12.4}{:>12.4}{:>12.4}",
                k, r.macro_precision, r.macro_recall, r.f_of_macro_pr, r.macro_f
            );
        }
        let chosen = self.chosen_k.map_or("none".to_string(), |k| k.to_string());
        let _ = writeln!(out, "chosen k: {chosen} ({})", self.decision);
        out
    }
}

/// Scores one candidate k.
pub trait KEvaluator {
    fn evaluate_k(&self, k: usize) -> Result<EvaluationReport, ReductionError>;
}

impl<F> KEvaluator for F
where
    F: Fn(usize) -> Result<EvaluationReport, ReductionError>,
{
    fn evaluate_k(&self, k: usize) -> Result<EvaluationReport, ReductionError> {
        self(k)
    }
}

/// Applies the selection rule to `(k, score)` pairs in ascending k order.
pub fn select_k(
    scores: &[(usize, f64)],
    threshold: f64,
    mode: SelectionMode,
) -> (Option<usize>, String) {
    match mode {
        SelectionMode::Threshold => match scores.iter().find(|(_, f)| *f >= threshold) {
            Some(&(k, f)) => (
                Some(k),
                format!("threshold: k={k} is the smallest k with average F {f:.4} >= {threshold}"),
            ),
            None => (
                None,
                format!("threshold: no k reached average F {threshold}"),
            ),
        },
        SelectionMode::Best => {
            let mut best: Option<(usize, f64)> = None;
            for &(k, f) in scores {
                if best.is_none_or(|(_, b)| f > b) {
                    best = Some((k, f));
                }
            }
            match best {
                Some((k, f)) => (
                    Some(k),
                    format!("best: k={k} has the highest average F {f:.4}"),
                ),
                None => (None, "best: empty grid".into()),
            }
        }
    }
}

/// Runs the line search with any per-k evaluator.
pub fn find_k_with<E: KEvaluator>(
    evaluator: &E,
    config: &FindKConfig,
) -> Result<FindKReport, ReductionError> {
    config.check_grid()?;
    let mut per_k = BTreeMap::new();
    for &k in &config.grid {
        per_k.insert(k, evaluator.evaluate_k(k)?);
    }
    let scores: Vec<(usize, f64)> = per_k.iter().map(|(&k, r)| (k, r.f_of_macro_pr)).collect();
    let (chosen_k, decision) = select_k(&scores, config.threshold, config.mode);
    Ok(FindKReport {
        grid: config.grid.clone(),
        per_k,
        chosen_k,
        mode: config.mode,
        threshold: config.threshold,
        decision,
    })
}

/// Asks every test respondent `k` fresh random questions, predicts the segment
/// from those answers alone and scores the predictions.
pub struct NetworkEvaluator<'a> {
    bn: &'a BayesianNetwork,
    test: &'a Dataset,
    labels: &'a [u8],
    pool: Vec<usize>,
    engine: Engine,
    n_samples: usize,
    seed: u64,
}

impl<'a> NetworkEvaluator<'a> {
    pub fn new(
        bn: &'a BayesianNetwork,
        test: &'a Dataset,
        config: &FindKConfig,
    ) -> Result<Self, ReductionError> {
        let pool = config.validate(bn.schema())?;
        let labels = test.labels().ok_or(ReductionError::UnlabeledTestSet)?;
        if test.is_empty() {
            return Err(ReductionError::NoPredictions);
        }
        if test.schema().names() != bn.schema().names() {
            return Err(ReductionError::InvalidConfig(
                "test set schema differs from the network schema".into(),
            ));
        }
        Ok(NetworkEvaluator {
            bn,
            test,
            labels,
            pool,
            engine: config.engine,
            n_samples: config.n_samples,
            seed: config.seed,
        })
    }

    /// Question subset and evidence for one respondent at one k. The random
    /// stream depends only on `(seed, k, row)`.
    pub fn evidence_for(&self, k: usize, row: usize) -> Result<(Evidence, u64), ReductionError> {
        let mut rng = rng::stream(self.seed, k as u64, row as u64);
        let questions = random_subset(&self.pool, k, &mut rng)?;
        let evidence = Evidence::from_indices(
            self.bn.schema(),
            questions.into_iter().map(|v| {
                (
                    v,
                    self.test
                        .value(row, v)
                        .expect("asked columns are always present"),
                )
            }),
        )
        .map_err(crate::inference::InferenceError::from)?;
        Ok((evidence, rng.gen()))
    }
}

impl KEvaluator for NetworkEvaluator<'_> {
    fn evaluate_k(&self, k: usize) -> Result<EvaluationReport, ReductionError> {
        let target = self.bn.schema().label_index();
        let predictions = (0..self.test.len())
            .into_par_iter()
            .map(|row| {
                let (evidence, query_seed) = self.evidence_for(k, row)?;
                Ok(predict(
                    self.bn,
                    target,
                    &evidence,
                    self.engine,
                    self.n_samples,
                    query_seed,
                )?)
            })
            .collect::<Result<Vec<usize>, ReductionError>>()?;
        let labels: Vec<usize> = self.labels.iter().map(|&l| l as usize).collect();
        let classes = &self.bn.schema().question(target).levels;
        evaluate(&predictions, &labels, classes)
    }
}

pub fn find_k(
    bn: &BayesianNetwork,
    test: &Dataset,
    config: &FindKConfig,
) -> Result<FindKReport, ReductionError> {
    let evaluator = NetworkEvaluator::new(bn, test, config)?;
    find_k_with(&evaluator, config)
}
