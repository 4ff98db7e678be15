use super::SurveyError;
use crate::network::SurveySchema;

pub const DIS: &str = "DIS";

/// Mobile-usage questions that feed the DIS attribute.
pub const USAGE_QUESTIONS: [&str; 6] = ["MBROW", "MEMAIL", "MBANK", "MVID", "GPS", "SMP"];

/// Level index of DIS for one row (level indices in schema order).
///
/// Counts the usage answers at level "4" or above: 0-1 is `low`, 2-3 `med`,
/// 4-6 `high`. Reads nothing but the six usage columns.
pub fn derive_dis(row: &[Option<usize>], schema: &SurveySchema) -> Result<usize, SurveyError> {
    let mut heavy = 0;
    for abbr in USAGE_QUESTIONS {
        let var = schema
            .index_of(abbr)
            .ok_or_else(|| SurveyError::MissingUsageAnswer(abbr.to_string()))?;
        let level = row
            .get(var)
            .copied()
            .flatten()
            .ok_or_else(|| SurveyError::MissingUsageAnswer(abbr.to_string()))?;
        let q = schema.question(var);
        let threshold = q
            .level_index("4")
            .unwrap_or(q.cardinality().saturating_sub(2));
        if level >= threshold {
            heavy += 1;
        }
    }
    let bucket = match heavy {
        0..=1 => "low",
        2..=3 => "med",
        _ => "high",
    };
    let dis = schema
        .index_of(DIS)
        .ok_or_else(|| SurveyError::ProfileSchemaMismatch("schema has no DIS variable".into()))?;
    schema
        .question(dis)
        .level_index(bucket)
        .ok_or_else(|| SurveyError::ProfileSchemaMismatch(format!("DIS has no `{bucket}` level")))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::survey::default_schema;

    fn row_with(schema: &SurveySchema, usage: [&str; 6]) -> Vec<Option<usize>> {
        let mut row = vec![Some(0); schema.len()];
        for (abbr, level) in USAGE_QUESTIONS.iter().zip(usage) {
            let (v, l) = schema.resolve(abbr, level).unwrap();
            row[v] = Some(l);
        }
        row
    }

    fn label(schema: &SurveySchema, level: usize) -> &str {
        &schema.question(schema.index_of(DIS).unwrap()).levels[level]
    }

    #[test]
    fn buckets() {
        let s = default_schema();
        let low = derive_dis(&row_with(&s, ["1"; 6]), &s).unwrap();
        assert_eq!(label(&s, low), "low");
        let med = derive_dis(&row_with(&s, ["5", "5", "5", "1", "1", "1"]), &s).unwrap();
        assert_eq!(label(&s, med), "med");
        let high = derive_dis(&row_with(&s, ["4"; 6]), &s).unwrap();
        assert_eq!(label(&s, high), "high");
        let one = derive_dis(&row_with(&s, ["4", "3", "3", "3", "3", "3"]), &s).unwrap();
        assert_eq!(label(&s, one), "low");
    }

    #[test]
    fn missing_usage_answer() {
        let s = default_schema();
        let mut row = row_with(&s, ["1"; 6]);
        row[s.index_of("GPS").unwrap()] = None;
        assert!(
            matches!(derive_dis(&row, &s), Err(SurveyError::MissingUsageAnswer(q)) if q == "GPS")
        );
    }

    proptest! {
        #[test]
        fn depends_only_on_usage_columns(
            usage in prop::array::uniform6(0usize..5),
            other in prop::collection::vec(0usize..3, 24),
        ) {
            let s = default_schema();
            let usage_idx: Vec<usize> = USAGE_QUESTIONS.iter().map(|q| s.index_of(q).unwrap()).collect();
            let mut a = vec![Some(0); s.len()];
            let mut b: Vec<Option<usize>> = other.into_iter().map(Some).collect();
            for (i, &v) in usage_idx.iter().enumerate() {
                a[v] = Some(usage[i]);
                b[v] = Some(usage[i]);
            }
            prop_assert_eq!(derive_dis(&a, &s).unwrap(), derive_dis(&b, &s).unwrap());
        }
    }
}
