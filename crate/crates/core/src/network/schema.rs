use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::NetworkError;

/// How a variable enters the questionnaire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Put to the respondent.
    Asked,
    /// Computed from other answers, never asked.
    Derived,
    /// The segment assignment.
    Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionSpec {
    pub abbr: String,
    #[serde(default)]
    pub text: String,
    pub levels: Vec<String>,
    pub role: Role,
}

impl QuestionSpec {
    pub fn new(abbr: &str, text: &str, levels: &[&str], role: Role) -> Self {
        QuestionSpec {
            abbr: abbr.to_string(),
            text: text.to_string(),
            levels: levels.iter().map(|l| l.to_string()).collect(),
            role,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.levels.len()
    }

    pub fn level_index(&self, level: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == level)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct SchemaDocument {
    label_var: String,
    questions: Vec<QuestionSpec>,
}

/// An ordered questionnaire with exactly one label variable.
///
/// Variable indices used throughout the crate are positions in this list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemaDocument", into = "SchemaDocument")]
pub struct SurveySchema {
    questions: Vec<QuestionSpec>,
    label: usize,
    #[serde(skip)]
    by_abbr: HashMap<String, usize>,
}

impl TryFrom<SchemaDocument> for SurveySchema {
    type Error = NetworkError;

    fn try_from(doc: SchemaDocument) -> Result<Self, Self::Error> {
        SurveySchema::new(doc.questions, &doc.label_var)
    }
}

impl From<SurveySchema> for SchemaDocument {
    fn from(schema: SurveySchema) -> Self {
        SchemaDocument {
            label_var: schema.label_var().to_string(),
            questions: schema.questions,
        }
    }
}

impl SurveySchema {
    pub fn new(questions: Vec<QuestionSpec>, label_var: &str) -> Result<Self, NetworkError> {
        let mut by_abbr = HashMap::with_capacity(questions.len());
        for (i, q) in questions.iter().enumerate() {
            if q.abbr.is_empty() {
                return Err(NetworkError::EmptyAbbr);
            }
            if by_abbr.insert(q.abbr.clone(), i).is_some() {
                return Err(NetworkError::DuplicateAbbr(q.abbr.clone()));
            }
            let mut seen = q.levels.clone();
            seen.sort();
            seen.dedup();
            if q.levels.len() < 2
                || seen.len() != q.levels.len()
                || q.levels.len() > u8::MAX as usize
            {
                return Err(NetworkError::BadLevels {
                    abbr: q.abbr.clone(),
                });
            }
        }
        let labels: Vec<usize> = questions
            .iter()
            .enumerate()
            .filter(|(_, q)| q.role == Role::Label)
            .map(|(i, _)| i)
            .collect();
        let label = match labels.as_slice() {
            [] => return Err(NetworkError::MissingLabelVar(label_var.to_string())),
            [one] if questions[*one].abbr == label_var => *one,
            [_] => return Err(NetworkError::MissingLabelVar(label_var.to_string())),
            _ => return Err(NetworkError::MultipleLabels),
        };
        Ok(SurveySchema {
            questions,
            label,
            by_abbr,
        })
    }

    pub fn from_json(document: &str) -> Result<Self, NetworkError> {
        serde_json::from_str(document).map_err(|e| {
            // try_from errors come back wrapped as serde messages; surface the
            // structured error when we can recover it.
            match serde_json::from_str::<SchemaDocument>(document) {
                Ok(doc) => SurveySchema::new(doc.questions, &doc.label_var)
                    .err()
                    .unwrap_or_else(|| NetworkError::MalformedDocument(e.to_string())),
                Err(_) => NetworkError::MalformedDocument(e.to_string()),
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn questions(&self) -> &[QuestionSpec] {
        &self.questions
    }

    pub fn len(&self) -> usize {
        self.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.questions.is_empty()
    }

    pub fn question(&self, index: usize) -> &QuestionSpec {
        &self.questions[index]
    }

    pub fn index_of(&self, abbr: &str) -> Option<usize> {
        self.by_abbr.get(abbr).copied()
    }

    pub fn label_var(&self) -> &str {
        &self.questions[self.label].abbr
    }

    pub fn label_index(&self) -> usize {
        self.label
    }

    pub fn cardinality(&self, index: usize) -> usize {
        self.questions[index].levels.len()
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.questions.iter().map(|q| q.levels.len()).collect()
    }

    pub fn names(&self) -> Vec<String> {
        self.questions.iter().map(|q| q.abbr.clone()).collect()
    }

    /// Indices of the questions a respondent can be asked, in schema order.
    pub fn asked_indices(&self) -> Vec<usize> {
        self.questions
            .iter()
            .enumerate()
            .filter(|(_, q)| q.role == Role::Asked)
            .map(|(i, _)| i)
            .collect()
    }

    /// Resolves a `(variable, level label)` pair to indices.
    pub fn resolve(&self, abbr: &str, level: &str) -> Result<(usize, usize), NetworkError> {
        let var = self
            .index_of(abbr)
            .ok_or_else(|| NetworkError::UnknownVariable(abbr.to_string()))?;
        let lvl =
            self.questions[var]
                .level_index(level)
                .ok_or_else(|| NetworkError::UnknownLevel {
                    variable: abbr.to_string(),
                    level: level.to_string(),
                })?;
        Ok((var, lvl))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(abbr: &str, role: Role) -> QuestionSpec {
        QuestionSpec::new(abbr, "", &["0", "1"], role)
    }

    #[test]
    fn rejects_duplicate_abbr() {
        let qs = vec![
            binary("PAM", Role::Asked),
            binary("PAM", Role::Asked),
            binary("S", Role::Label),
        ];
        assert_eq!(
            SurveySchema::new(qs, "S").unwrap_err(),
            NetworkError::DuplicateAbbr("PAM".into())
        );
    }

    #[test]
    fn rejects_missing_label() {
        let qs = vec![binary("A", Role::Asked), binary("B", Role::Asked)];
        assert!(matches!(
            SurveySchema::new(qs, "S"),
            Err(NetworkError::MissingLabelVar(_))
        ));
    }

    #[test]
    fn rejects_label_name_mismatch() {
        let qs = vec![binary("A", Role::Asked), binary("B", Role::Label)];
        assert!(matches!(
            SurveySchema::new(qs, "S"),
            Err(NetworkError::MissingLabelVar(_))
        ));
    }

    #[test]
    fn rejects_bad_levels() {
        let one = QuestionSpec::new("A", "", &["x"], Role::Asked);
        let dup = QuestionSpec::new("B", "", &["x", "x"], Role::Asked);
        for q in [one, dup] {
            let qs = vec![q, binary("S", Role::Label)];
            assert!(matches!(
                SurveySchema::new(qs, "S"),
                Err(NetworkError::BadLevels { .. })
            ));
        }
    }

    #[test]
    fn json_round_trip_and_errors() {
        let qs = vec![
            binary("A", Role::Asked),
            binary("D", Role::Derived),
            binary("S", Role::Label),
        ];
        let schema = SurveySchema::new(qs, "S").unwrap();
        let back = SurveySchema::from_json(&schema.to_json()).unwrap();
        assert_eq!(back, schema);
        assert_eq!(back.index_of("D"), Some(1));
        assert_eq!(back.asked_indices(), vec![0]);

        let dup = r#"{"labelVar":"S","questions":[
            {"abbr":"A","text":"","levels":["0","1"],"role":"asked"},
            {"abbr":"A","text":"","levels":["0","1"],"role":"asked"},
            {"abbr":"S","text":"","levels":["0","1"],"role":"label"}]}"#;
        assert_eq!(
            SurveySchema::from_json(dup).unwrap_err(),
            NetworkError::DuplicateAbbr("A".into())
        );
        assert!(matches!(
            SurveySchema::from_json("{"),
            Err(NetworkError::MalformedDocument(_))
        ));
    }
}
