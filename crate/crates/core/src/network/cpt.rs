use super::{NetworkError, ROW_SUM_TOLERANCE};

/// Conditional probability table of one variable given its parents.
///
/// Rows are indexed mixed-radix over the parent levels in declared parent
/// order, with the last parent varying fastest. The table is stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    variable: String,
    cardinality: usize,
    parents: Vec<String>,
    parent_cards: Vec<usize>,
    table: Vec<f64>,
}

impl Cpt {
    pub fn new(
        variable: &str,
        cardinality: usize,
        parents: Vec<(String, usize)>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, NetworkError> {
        Self::with_tolerance(
            variable,
            cardinality,
            parents,
            rows,
            ROW_SUM_TOLERANCE,
            false,
        )
    }

    /// Builds a table, renormalizing rows when `renormalize` is set and the
    /// row sum is within `tolerance` of one.
    pub(crate) fn with_tolerance(
        variable: &str,
        cardinality: usize,
        parents: Vec<(String, usize)>,
        rows: Vec<Vec<f64>>,
        tolerance: f64,
        renormalize: bool,
    ) -> Result<Self, NetworkError> {
        let invalid = |reason: String| NetworkError::InvalidCpt {
            variable: variable.to_string(),
            reason,
        };
        if cardinality < 2 {
            return Err(invalid(format!("cardinality {cardinality} < 2")));
        }
        let (parents, parent_cards): (Vec<String>, Vec<usize>) = parents.into_iter().unzip();
        let expected_rows: usize = parent_cards.iter().product();
        if rows.len() != expected_rows {
            return Err(invalid(format!(
                "{} rows, expected {expected_rows}",
                rows.len()
            )));
        }
        let mut table = Vec::with_capacity(expected_rows * cardinality);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != cardinality {
                return Err(invalid(format!(
                    "row {r} has {} columns, expected {cardinality}",
                    row.len()
                )));
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0) {
                return Err(invalid(format!("row {r} has an entry outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > tolerance {
                return Err(invalid(format!("row {r} sums to {sum}")));
            }
            if renormalize {
                table.extend(row.iter().map(|p| p / sum));
            } else {
                table.extend(row);
            }
        }
        Ok(Cpt {
            variable: variable.to_string(),
            cardinality,
            parents,
            parent_cards,
            table,
        })
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }

    pub fn parents(&self) -> &[String] {
        &self.parents
    }

    pub fn parent_cardinalities(&self) -> &[usize] {
        &self.parent_cards
    }

    pub fn row_count(&self) -> usize {
        self.table.len() / self.cardinality
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.table[index * self.cardinality..(index + 1) * self.cardinality]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.table.chunks(self.cardinality)
    }

    /// The flat row-major table.
    pub fn values(&self) -> &[f64] {
        &self.table
    }

    /// Number of free parameters: `(levels - 1) * rows`.
    pub fn free_parameters(&self) -> usize {
        (self.cardinality - 1) * self.row_count()
    }

    /// Row index for parent levels given in parent order. No bounds checks.
    #[inline]
    pub fn row_index_unchecked(&self, parent_levels: impl IntoIterator<Item = usize>) -> usize {
        parent_levels
            .into_iter()
            .zip(&self.parent_cards)
            .fold(0, |acc, (lvl, card)| acc * card + lvl)
    }

    /// Row index for the parent configuration found through `value_of`, which
    /// maps a parent name to its level index.
    pub fn parent_config_index<F>(&self, value_of: F) -> Result<usize, NetworkError>
    where
        F: Fn(&str) -> Option<usize>,
    {
        let mut index = 0;
        for (name, &card) in self.parents.iter().zip(&self.parent_cards) {
            let level =
                value_of(name).ok_or_else(|| NetworkError::MissingParentValue(name.clone()))?;
            if level >= card {
                return Err(NetworkError::InvalidLevel {
                    variable: name.clone(),
                    level,
                });
            }
            index = index * card + level;
        }
        Ok(index)
    }

    #[inline]
    pub fn probability(&self, row: usize, level: usize) -> f64 {
        self.table[row * self.cardinality + level]
    }
}
