//! CSV ingestion: a header row, the class label in the last column.

use super::{Attribute, Dataset};
use crate::{Error, Result};

/// Columns whose every value parses as a finite number become numeric;
/// the rest become nominal with categories in first-appearance order.
pub fn parse_csv(text: &str) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.len() < 2 {
        return Err(Error::Parse { line: 1, message: "need at least one feature and a class column".into() });
    }
    let mut raw: Vec<Vec<String>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::Parse {
                line: i + 2,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        if let Some(j) = record.iter().position(|f| f.is_empty() || f == "?") {
            return Err(Error::Parse { line: i + 2, message: format!("missing value for {}", header[j]) });
        }
        raw.push(record.iter().map(str::to_string).collect());
    }
    if raw.is_empty() {
        return Err(Error::Validation("no data rows".into()));
    }

    let n_features = header.len() - 1;
    let mut schema = Vec::with_capacity(n_features);
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n_features);
    for (j, name) in header.iter().take(n_features).enumerate() {
        let numeric: Option<Vec<f64>> =
            raw.iter().map(|r| r[j].parse::<f64>().ok().filter(|v| v.is_finite())).collect();
        match numeric {
            Some(col) => {
                schema.push(Attribute::numeric(name.clone(), None)?);
                columns.push(col);
            }
            None => {
                let mut categories: Vec<String> = Vec::new();
                let col = raw
                    .iter()
                    .map(|r| match categories.iter().position(|c| c == &r[j]) {
                        Some(k) => k as f64,
                        None => {
                            categories.push(r[j].clone());
                            (categories.len() - 1) as f64
                        }
                    })
                    .collect();
                schema.push(Attribute::nominal(name.clone(), categories)?);
                columns.push(col);
            }
        }
    }
    let rows = raw
        .iter()
        .enumerate()
        .map(|(i, r)| ((0..n_features).map(|j| columns[j][i]).collect(), r[n_features].clone()))
        .collect();
    Dataset::from_labelled_rows("", schema, header[n_features].clone(), rows)
}
