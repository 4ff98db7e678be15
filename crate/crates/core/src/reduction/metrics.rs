use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ReductionError;

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EvaluationReport {
    pub classes: Vec<String>,
    pub per_class: BTreeMap<String, ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    /// Unweighted mean of per-class F-scores.
    pub macro_f: f64,
    /// `f_score(macro_precision, macro_recall)`; the "Average" row of the
    /// per-k tables and the quantity that drives k selection.
    pub f_of_macro_pr: f64,
    /// `confusion[true][predicted]`, classes in `classes` order.
    pub confusion: Vec<Vec<usize>>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Per-class and macro-averaged precision, recall and F-score. Predictions and
/// labels are class indices into `classes`.
pub fn evaluate(
    predictions: &[usize],
    labels: &[usize],
    classes: &[String],
) -> Result<EvaluationReport, ReductionError> {
    if predictions.len() != labels.len() {
        return Err(ReductionError::LengthMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(ReductionError::NoPredictions);
    }
    let k = classes.len();
    if let Some(&bad) = predictions.iter().chain(labels).find(|&&c| c >= k) {
        return Err(ReductionError::UnknownClass(bad));
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &t) in predictions.iter().zip(labels) {
        confusion[t][p] += 1;
    }
    let mut per_class = BTreeMap::new();
    let (mut sum_p, mut sum_r, mut sum_f) = (0.0, 0.0, 0.0);
    for c in 0..k {
        let tp = confusion[c][c];
        let support: usize = confusion[c].iter().sum();
        let predicted: usize = (0..k).map(|t| confusion[t][c]).sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f = f_score(precision, recall);
        sum_p += precision;
        sum_r += recall;
        sum_f += f;
        per_class.insert(
            classes[c].clone(),
            ClassMetrics {
                precision,
                recall,
                f_score: f,
                support,
            },
        );
    }
    let macro_precision = sum_p / k as f64;
    let macro_recall = sum_r / k as f64;
    Ok(EvaluationReport {
        classes: classes.to_vec(),
        per_class,
        macro_precision,
        macro_recall,
        macro_f: sum_f / k as f64,
        f_of_macro_pr: f_score(macro_precision, macro_recall),
        confusion,
    })
}

impl EvaluationReport {
    /// Segment / Precision / Recall / F-Score rows followed by an Average row.
    pub fn render_table(&self, title: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{title}");
        let _ = writeln!(
            out,
            "{:<10}{:>10}{:>10}{:>10}{:>10}",
            "Segment", "Precision", "Recall", "F-Score", "Support"
        );
        for c in &self.classes {
            let m = &self.per_class[c];
            let _ = writeln!(
                out,
                "{:<10}{:>10.2}{:>10.2}{:>10.2}{:>10}",
                c, m.precision, m.recall, m.f_score, m.support
            );
        }
        let total: usize = self.per_class.values().map(|m| m.support).sum();
        let _ = writeln!(
            out,
            "{:<10}{:>10.2}{:>10.2}{:>10.2}{:>10}",
            "Average", self.macro_precision, self.macro_recall, self.f_of_macro_pr, total
        );
        out
    }
}
