use thiserror::Error;

use crate::network::SurveySchema;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("row {row} has {got} values, expected {expected}")]
    RowLength {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid level index {level} at row {row}, column `{column}`")]
    InvalidLevel {
        row: usize,
        column: String,
        level: usize,
    },
    #[error("column `{0}` is missing")]
    MissingColumn(String),
    #[error("column `{column}` has {got} rows, expected {expected}")]
    ColumnLength {
        column: String,
        expected: usize,
        got: usize,
    },
}

/// Complete categorical responses, stored column-major as level indices.
///
/// Every schema variable has a column except, optionally, the label.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: SurveySchema,
    columns: Vec<Option<Vec<u8>>>,
    n_rows: usize,
}

impl Dataset {
    /// Builds from rows that assign every schema variable, label included.
    pub fn from_rows(schema: SurveySchema, rows: &[Vec<usize>]) -> Result<Self, DatasetError> {
        let n_vars = schema.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); n_vars];
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n_vars {
                return Err(DatasetError::RowLength {
                    row: r,
                    expected: n_vars,
                    got: row.len(),
                });
            }
            for (v, &lvl) in row.iter().enumerate() {
                if lvl >= schema.cardinality(v) {
                    return Err(DatasetError::InvalidLevel {
                        row: r,
                        column: schema.question(v).abbr.clone(),
                        level: lvl,
                    });
                }
                columns[v].push(lvl as u8);
            }
        }
        Ok(Dataset {
            schema,
            columns: columns.into_iter().map(Some).collect(),
            n_rows: rows.len(),
        })
    }

    /// Builds from columns in schema order; only the label column may be `None`.
    pub fn from_columns(
        schema: SurveySchema,
        columns: Vec<Option<Vec<u8>>>,
    ) -> Result<Self, DatasetError> {
        if columns.len() != schema.len() {
            return Err(DatasetError::RowLength {
                row: 0,
                expected: schema.len(),
                got: columns.len(),
            });
        }
        let n_rows = columns.iter().flatten().map(Vec::len).next().unwrap_or(0);
        for (v, col) in columns.iter().enumerate() {
            let name = &schema.question(v).abbr;
            match col {
                None if v != schema.label_index() => {
                    return Err(DatasetError::MissingColumn(name.clone()))
                }
                None => {}
                Some(values) => {
                    if values.len() != n_rows {
                        return Err(DatasetError::ColumnLength {
                            column: name.clone(),
                            expected: n_rows,
                            got: values.len(),
                        });
                    }
                    let card = schema.cardinality(v);
                    if let Some(r) = values.iter().position(|&l| l as usize >= card) {
                        return Err(DatasetError::InvalidLevel {
                            row: r,
                            column: name.clone(),
                            level: values[r] as usize,
                        });
                    }
                }
            }
        }
        Ok(Dataset {
            schema,
            columns,
            n_rows,
        })
    }

    pub fn schema(&self) -> &SurveySchema {
        &self.schema
    }

    pub fn len(&self) -> usize {
        self.n_rows
    }

    pub fn is_empty(&self) -> bool {
        self.n_rows == 0
    }

    pub fn has_labels(&self) -> bool {
        self.columns[self.schema.label_index()].is_some()
    }

    pub fn column(&self, var: usize) -> Option<&[u8]> {
        self.columns[var].as_deref()
    }

    /// Indices of variables with data.
    pub fn present_columns(&self) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&v| self.columns[v].is_some())
            .collect()
    }

    #[inline]
    pub fn value(&self, row: usize, var: usize) -> Option<usize> {
        self.columns[var].as_ref().map(|c| c[row] as usize)
    }

    /// Level indices of one row; absent columns are `None`.
    pub fn row(&self, row: usize) -> Vec<Option<usize>> {
        (0..self.columns.len())
            .map(|v| self.value(row, v))
            .collect()
    }

    pub fn labels(&self) -> Option<&[u8]> {
        self.column(self.schema.label_index())
    }

    /// Rows selected by `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let columns = self
            .columns
            .iter()
            .map(|c| c.as_ref().map(|c| indices.iter().map(|&i| c[i]).collect()))
            .collect();
        Dataset {
            schema: self.schema.clone(),
            columns,
            n_rows: indices.len(),
        }
    }

    /// Copy of this dataset without the label column.
    pub fn without_labels(&self) -> Dataset {
        let mut out = self.clone();
        out.columns[self.schema.label_index()] = None;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{QuestionSpec, Role};

    fn schema() -> SurveySchema {
        SurveySchema::new(
            vec![
                QuestionSpec::new("A", "", &["0", "1", "2"], Role::Asked),
                QuestionSpec::new("S", "", &["x", "y"], Role::Label),
            ],
            "S",
        )
        .unwrap()
    }

    #[test]
    fn rows_and_columns_agree() {
        let ds = Dataset::from_rows(schema(), &[vec![2, 0], vec![1, 1]]).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.column(0).unwrap(), &[2, 1]);
        assert_eq!(ds.row(1), vec![Some(1), Some(1)]);
        let sub = ds.subset(&[1]);
        assert_eq!(sub.row(0), vec![Some(1), Some(1)]);
        assert!(!ds.without_labels().has_labels());
    }

    #[test]
    fn validates_levels_and_columns() {
        assert!(matches!(
            Dataset::from_rows(schema(), &[vec![3, 0]]),
            Err(DatasetError::InvalidLevel { row: 0, .. })
        ));
        assert!(matches!(
            Dataset::from_columns(schema(), vec![None, Some(vec![0])]),
            Err(DatasetError::MissingColumn(_))
        ));
        let unlabeled = Dataset::from_columns(schema(), vec![Some(vec![0, 2]), None]).unwrap();
        assert_eq!(unlabeled.len(), 2);
        assert!(unlabeled.labels().is_none());
    }
}
