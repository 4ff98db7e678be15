use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::SurveyError;
use crate::dataset::Dataset;
use crate::network::SurveySchema;

/// Reads a response file. The header must name schema variables; every
/// non-label variable is required, the label only when `require_label`.
/// Row numbers in errors count data rows from 1.
pub fn read_csv(
    path: impl AsRef<Path>,
    schema: &SurveySchema,
    require_label: bool,
) -> Result<Dataset, SurveyError> {
    let file = File::open(path)?;
    read_csv_from(file, schema, require_label)
}

pub fn read_csv_from<R: Read>(
    reader: R,
    schema: &SurveySchema,
    require_label: bool,
) -> Result<Dataset, SurveyError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(SurveyError::EmptyFile);
    }

    // file column -> schema variable
    let mut mapping = Vec::with_capacity(header.len());
    let mut seen = vec![false; schema.len()];
    for name in header.iter() {
        let var = schema
            .index_of(name)
            .ok_or_else(|| SurveyError::UnknownColumn(name.to_string()))?;
        if seen[var] {
            return Err(SurveyError::DuplicateColumn(name.to_string()));
        }
        seen[var] = true;
        mapping.push(var);
    }
    let label = schema.label_index();
    for (var, present) in seen.iter().enumerate() {
        if !present && (var != label || require_label) {
            return Err(SurveyError::MissingColumn(
                schema.question(var).abbr.clone(),
            ));
        }
    }

    let mut columns: Vec<Option<Vec<u8>>> = seen.iter().map(|&p| p.then(Vec::new)).collect();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        if record.len() != mapping.len() {
            return Err(SurveyError::RaggedRow {
                row,
                expected: mapping.len(),
                got: record.len(),
            });
        }
        for (cell, &var) in record.iter().zip(&mapping) {
            let q = schema.question(var);
            let level = q
                .level_index(cell)
                .ok_or_else(|| SurveyError::InvalidLevel {
                    row,
                    column: q.abbr.clone(),
                    value: cell.to_string(),
                })?;
            columns[var]
                .as_mut()
                .expect("mapped column")
                .push(level as u8);
        }
    }
    Ok(Dataset::from_columns(schema.clone(), columns)?)
}

/// Writes the dataset with a header in schema order; the label column is
/// omitted when the dataset has none.
pub fn write_csv(path: impl AsRef<Path>, dataset: &Dataset) -> Result<(), SurveyError> {
    let file = File::create(path)?;
    write_csv_to(file, dataset)
}

pub fn write_csv_to<W: Write>(writer: W, dataset: &Dataset) -> Result<(), SurveyError> {
    let schema = dataset.schema();
    let vars = dataset.present_columns();
    let mut wtr = csv::WriterBuilder::new().from_writer(writer);
    wtr.write_record(vars.iter().map(|&v| schema.question(v).abbr.as_str()))?;
    for r in 0..dataset.len() {
        wtr.write_record(vars.iter().map(|&v| {
            let lvl = dataset.value(r, v).expect("present column");
            schema.question(v).levels[lvl].as_str()
        }))?;
    }
    wtr.flush()?;
    Ok(())
}
