use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::dis::{derive_dis, DIS};
use super::SurveyError;
use crate::dataset::Dataset;
use crate::network::{Role, SurveySchema};
use crate::rng;

const TOLERANCE: f64 = 1e-9;

/// Synthetic population: a segment prior plus, per segment, one categorical
/// response distribution for every asked question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GeneratorConfig {
    /// Segment label -> probability.
    pub segment_prior: BTreeMap<String, f64>,
    /// Segment label -> question abbreviation -> distribution over its levels.
    pub response_profiles: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
    /// Probability mass mixed in as a uniform response.
    pub noise: f64,
    pub rows: usize,
    pub seed: u64,
}

/// Per-segment, per-question sampling distributions after noise mixing.
struct Resolved {
    prior: Vec<f64>,
    /// `[segment][asked question position]`
    mixed: Vec<Vec<Vec<f64>>>,
    asked: Vec<usize>,
}

fn check_distribution(what: &str, probs: &[f64]) -> Result<(), SurveyError> {
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(SurveyError::InvalidConfig(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > TOLERANCE {
        return Err(SurveyError::InvalidConfig(format!("{what} sums to {sum}")));
    }
    Ok(())
}

impl GeneratorConfig {
    pub fn from_json(document: &str) -> Result<Self, SurveyError> {
        serde_json::from_str(document).map_err(|e| SurveyError::InvalidConfig(e.to_string()))
    }

    pub fn validate(&self, schema: &SurveySchema) -> Result<(), SurveyError> {
        self.resolve(schema).map(|_| ())
    }

    fn resolve(&self, schema: &SurveySchema) -> Result<Resolved, SurveyError> {
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(SurveyError::InvalidConfig(format!(
                "noise {} outside [0, 1]",
                self.noise
            )));
        }
        for q in schema.questions() {
            if q.role == Role::Derived && q.abbr != DIS {
                return Err(SurveyError::ProfileSchemaMismatch(format!(
                    "no derivation rule for derived variable `{}`",
                    q.abbr
                )));
            }
        }
        let segments = &schema.question(schema.label_index()).levels;
        for name in self
            .segment_prior
            .keys()
            .chain(self.response_profiles.keys())
        {
            if !segments.contains(name) {
                return Err(SurveyError::ProfileSchemaMismatch(format!(
                    "unknown segment `{name}`"
                )));
            }
        }
        let prior: Vec<f64> = segments
            .iter()
            .map(|s| self.segment_prior.get(s).copied().unwrap_or(0.0))
            .collect();
        check_distribution("segmentPrior", &prior)?;

        let asked = schema.asked_indices();
        let mut mixed = Vec::with_capacity(segments.len());
        for seg in segments {
            let profile = self.response_profiles.get(seg);
            if profile.is_none() && self.segment_prior.get(seg).copied().unwrap_or(0.0) > 0.0 {
                return Err(SurveyError::ProfileSchemaMismatch(format!(
                    "no profile for segment `{seg}`"
                )));
            }
            let empty = BTreeMap::new();
            let profile = profile.unwrap_or(&empty);
            for abbr in profile.keys() {
                match schema.index_of(abbr) {
                    Some(v) if schema.question(v).role == Role::Asked => {}
                    _ => {
                        return Err(SurveyError::ProfileSchemaMismatch(format!(
                            "`{abbr}` in profile `{seg}` is not an asked question"
                        )))
                    }
                }
            }
            let mut per_question = Vec::with_capacity(asked.len());
            for &v in &asked {
                let q = schema.question(v);
                let card = q.cardinality();
                let dist = match profile.get(&q.abbr) {
                    Some(d) => d.clone(),
                    None if profile.is_empty() => vec![1.0 / card as f64; card],
                    None => {
                        return Err(SurveyError::ProfileSchemaMismatch(format!(
                            "segment `{seg}` has no profile for `{}`",
                            q.abbr
                        )))
                    }
                };
                if dist.len() != card {
                    return Err(SurveyError::ProfileSchemaMismatch(format!(
                        "`{}` in segment `{seg}` has {} probabilities for {card} levels",
                        q.abbr,
                        dist.len()
                    )));
                }
                check_distribution(&format!("profile {seg}/{}", q.abbr), &dist)?;
                let uniform = self.noise / card as f64;
                per_question.push(
                    dist.iter()
                        .map(|p| (1.0 - self.noise) * p + uniform)
                        .collect(),
                );
            }
            mixed.push(per_question);
        }
        Ok(Resolved {
            prior,
            mixed,
            asked,
        })
    }
}

fn draw(rng: &mut rng::Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Samples `config.rows` labelled respondents. Each row draws a segment from
/// the prior, every asked question from the segment's noise-mixed profile,
/// then fills in DIS from the usage answers.
pub fn generate_synthetic(
    schema: &SurveySchema,
    config: &GeneratorConfig,
) -> Result<Dataset, SurveyError> {
    let resolved = config.resolve(schema)?;
    let label = schema.label_index();
    let dis = schema.index_of(DIS);
    let mut rng = rng::seeded(config.seed);
    let mut rows = Vec::with_capacity(config.rows);
    let mut row: Vec<Option<usize>> = vec![None; schema.len()];
    for _ in 0..config.rows {
        let segment = draw(&mut rng, &resolved.prior);
        row[label] = Some(segment);
        for (pos, &v) in resolved.asked.iter().enumerate() {
            row[v] = Some(draw(&mut rng, &resolved.mixed[segment][pos]));
        }
        if let Some(d) = dis {
            row[d] = Some(derive_dis(&row, schema)?);
        }
        rows.push(
            row.iter()
                .map(|x| x.expect("every variable filled"))
                .collect(),
        );
    }
    Ok(Dataset::from_rows(schema.clone(), &rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::survey::{default_generator_config, default_schema};

    #[test]
    fn zero_rows() {
        let cfg = GeneratorConfig {
            rows: 0,
            ..default_generator_config()
        };
        assert!(generate_synthetic(&default_schema(), &cfg)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn deterministic_for_seed() {
        let cfg = GeneratorConfig {
            rows: 200,
            ..default_generator_config()
        };
        let a = generate_synthetic(&default_schema(), &cfg).unwrap();
        let b = generate_synthetic(&default_schema(), &cfg).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&default_schema(), &GeneratorConfig { seed: 1, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn full_noise_is_uniform() {
        let schema = default_schema();
        let cfg = GeneratorConfig {
            rows: 100_000,
            noise: 1.0,
            ..default_generator_config()
        };
        let ds = generate_synthetic(&schema, &cfg).unwrap();
        for v in schema.asked_indices() {
            let card = schema.cardinality(v);
            let mut counts = vec![0usize; card];
            for &l in ds.column(v).unwrap() {
                counts[l as usize] += 1;
            }
            for c in counts {
                let freq = c as f64 / ds.len() as f64;
                assert!((freq - 1.0 / card as f64).abs() <= 0.02);
            }
        }
    }

    #[test]
    fn degenerate_profiles_repeat_rows() {
        let schema = default_schema();
        let mut cfg = default_generator_config();
        cfg.noise = 0.0;
        cfg.rows = 500;
        for (s, profile) in cfg.response_profiles.iter_mut().enumerate() {
            for dist in profile.1.values_mut() {
                let hot = (s + dist.len()) % dist.len();
                *dist = (0..dist.len())
                    .map(|i| if i == hot { 1.0 } else { 0.0 })
                    .collect();
            }
        }
        let ds = generate_synthetic(&schema, &cfg).unwrap();
        let label = schema.label_index();
        let mut first: BTreeMap<usize, Vec<Option<usize>>> = BTreeMap::new();
        for r in 0..ds.len() {
            let row = ds.row(r);
            let seg = row[label].unwrap();
            let expected = first.entry(seg).or_insert_with(|| row.clone());
            assert_eq!(&row, expected);
        }
    }

    #[test]
    fn mismatched_profiles_are_rejected() {
        let schema = default_schema();
        let mut cfg = default_generator_config();
        cfg.response_profiles
            .get_mut("S1")
            .unwrap()
            .insert("NOPE".into(), vec![0.5, 0.5]);
        assert!(matches!(
            generate_synthetic(&schema, &cfg),
            Err(SurveyError::ProfileSchemaMismatch(_))
        ));
        let mut cfg = default_generator_config();
        cfg.response_profiles
            .get_mut("S2")
            .unwrap()
            .insert("PAM".into(), vec![0.5, 0.5]);
        assert!(matches!(
            generate_synthetic(&schema, &cfg),
            Err(SurveyError::ProfileSchemaMismatch(_))
        ));
        let mut cfg = default_generator_config();
        cfg.noise = 1.5;
        assert!(matches!(
            generate_synthetic(&schema, &cfg),
            Err(SurveyError::InvalidConfig(_))
        ));
        let mut cfg = default_generator_config();
        cfg.segment_prior.insert("S1".into(), 0.9);
        assert!(matches!(
            generate_synthetic(&schema, &cfg),
            Err(SurveyError::InvalidConfig(_))
        ));
    }
}
