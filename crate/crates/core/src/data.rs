//! Tabular binary-classification data: CSV ingestion, train/test splitting
//! and the per-feature statistics used for distance normalization and
//! epsilon scaling.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{compensated_sum, Scalar};
use crate::sign::Sign;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),
    #[error("no feature columns besides the label column")]
    NoFeatures,
    #[error("unmapped label `{value}` at row {row}")]
    UnmappedLabel { row: usize, value: String },
    #[error("missing value at row {row}, column `{column}`")]
    MissingValue { row: usize, column: String },
    #[error("non-numeric value `{value}` at row {row}, column `{column}`")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("ragged row {row}: expected {expected} cells, found {found}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("dataset is empty")]
    Empty,
    #[error("row {row} has {found} features, schema has {expected}")]
    Arity {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("labels and rows differ in length ({labels} vs {rows})")]
    LabelCount { labels: usize, rows: usize },
    #[error("train fraction must lie in (0, 1), got {0}")]
    BadFraction(f64),
    #[error("{split} split has no rows")]
    EmptySplit { split: &'static str },
    #[error("class {class} absent from {split} split")]
    ClassAbsent { class: Sign, split: &'static str },
    #[error("invalid label map entry `{0}` (expected name=+1 or name=-1)")]
    LabelMapSyntax(String),
}

/// Mapping from raw label strings to classes, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMap(Vec<(String, Sign)>);

impl LabelMap {
    pub fn new(entries: Vec<(String, Sign)>) -> Self {
        LabelMap(entries)
    }

    /// Maps `1`, `+1` and `-1` to themselves; the format written by
    /// [`Dataset::write_csv`].
    pub fn numeric() -> Self {
        LabelMap(vec![
            ("1".to_string(), Sign::Positive),
            ("+1".to_string(), Sign::Positive),
            ("-1".to_string(), Sign::Negative),
        ])
    }

    /// Parses `yes=+1,no=-1`.
    pub fn parse(spec: &str) -> Result<Self, DataError> {
        let mut entries = Vec::new();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, class) = item
                .rsplit_once('=')
                .ok_or_else(|| DataError::LabelMapSyntax(item.to_string()))?;
            let class = Sign::parse(class).ok_or_else(|| DataError::LabelMapSyntax(item.to_string()))?;
            entries.push((name.trim().to_string(), class));
        }
        if entries.is_empty() {
            return Err(DataError::LabelMapSyntax(spec.to_string()));
        }
        Ok(LabelMap(entries))
    }

    pub fn get(&self, raw: &str) -> Option<Sign> {
        self.0.iter().find(|(k, _)| k == raw).map(|(_, s)| *s)
    }

    pub fn entries(&self) -> &[(String, Sign)] {
        &self.0
    }
}

/// Per-feature description and population statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema<T> {
    pub name: String,
    pub index: usize,
    pub min: T,
    pub max: T,
    pub mean: T,
    pub stddev: T,
    /// Constant features cannot appear in a split and are excluded from
    /// distances.
    pub constant: bool,
}

impl<T: Scalar> FeatureSchema<T> {
    pub fn range(&self) -> T {
        self.max - self.min
    }
}

/// Distance normalization entry for one feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats<T> {
    pub mean: T,
    pub stddev: T,
    pub excluded: bool,
}

impl<T: Scalar> FeatureStats<T> {
    pub fn from_schema(schema: &[FeatureSchema<T>]) -> Vec<FeatureStats<T>> {
        schema
            .iter()
            .map(|f| FeatureStats {
                mean: f.mean,
                stddev: f.stddev,
                excluded: f.constant,
            })
            .collect()
    }
}

/// A single instance to predict or explain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance<T> {
    pub values: Vec<T>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub id: Option<usize>,
}

impl<T: Scalar> Instance<T> {
    pub fn new(values: Vec<T>) -> Self {
        Instance { values, id: None }
    }

    pub fn from_row(ds: &Dataset<T>, i: usize) -> Option<Self> {
        ds.rows.get(i).map(|r| Instance {
            values: r.clone(),
            id: Some(i),
        })
    }
}

/// Immutable labelled feature matrix with its schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    rows: Vec<Vec<T>>,
    labels: Vec<Sign>,
    schema: Vec<FeatureSchema<T>>,
}

impl<T: Scalar> Dataset<T> {
    /// Builds a dataset and computes schema statistics over all rows.
    pub fn new(names: Vec<String>, rows: Vec<Vec<T>>, labels: Vec<Sign>) -> Result<Self, DataError> {
        if rows.is_empty() {
            return Err(DataError::Empty);
        }
        if names.is_empty() {
            return Err(DataError::NoFeatures);
        }
        if labels.len() != rows.len() {
            return Err(DataError::LabelCount {
                labels: labels.len(),
                rows: rows.len(),
            });
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != names.len() {
                return Err(DataError::Arity {
                    row: i,
                    expected: names.len(),
                    found: r.len(),
                });
            }
        }
        let schema = compute_schema(&names, &rows);
        Ok(Dataset { rows, labels, schema })
    }

    /// Rows paired with a schema computed elsewhere (the test half of a split).
    fn with_schema(rows: Vec<Vec<T>>, labels: Vec<Sign>, schema: Vec<FeatureSchema<T>>) -> Self {
        Dataset { rows, labels, schema }
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> Option<&[T]> {
        self.rows.get(i).map(Vec::as_slice)
    }

    pub fn labels(&self) -> &[Sign] {
        &self.labels
    }

    pub fn schema(&self) -> &[FeatureSchema<T>] {
        &self.schema
    }

    pub fn feature_names(&self) -> Vec<String> {
        self.schema.iter().map(|f| f.name.clone()).collect()
    }

    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn has_class(&self, class: Sign) -> bool {
        self.labels.contains(&class)
    }

    /// Writes features followed by the label column (labels as `1`/`-1`).
    pub fn write_csv<W: Write>(&self, writer: W, label_column: &str) -> Result<(), DataError> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = self.feature_names();
        header.push(label_column.to_string());
        w.write_record(&header)?;
        for (row, label) in self.rows.iter().zip(&self.labels) {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            rec.push(label.as_i8().to_string());
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| DataError::Csv(e.into()))?;
        Ok(())
    }
}

fn compute_schema<T: Scalar>(names: &[String], rows: &[Vec<T>]) -> Vec<FeatureSchema<T>> {
    let n = T::from_usize(rows.len()).expect("row count fits scalar");
    names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let column = || rows.iter().map(move |r| r[j]);
            let min = column().fold(T::infinity(), T::min);
            let max = column().fold(T::neg_infinity(), T::max);
            let constant = min == max;
            let (mean, stddev) = if constant {
                (min, T::zero())
            } else {
                let mean = (compensated_sum(column()) / n).max(min).min(max);
                let var = compensated_sum(column().map(|v| (v - mean) * (v - mean))) / n;
                (mean, var.sqrt())
            };
            FeatureSchema {
                name: name.clone(),
                index: j,
                min,
                max,
                mean,
                stddev,
                constant,
            }
        })
        .collect()
}

/// Loads a headered CSV. Row numbers in errors count data rows from 1.
pub fn load_csv<T: Scalar>(
    path: impl AsRef<Path>,
    label_column: &str,
    label_map: &LabelMap,
) -> Result<Dataset<T>, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, label_column, label_map)
}

/// [`load_csv`] over any reader.
pub fn read_csv<T: Scalar, R: Read>(
    reader: R,
    label_column: &str,
    label_map: &LabelMap,
) -> Result<Dataset<T>, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| DataError::MissingLabelColumn(label_column.to_string()))?;
    let names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row_no = i + 1;
        if rec.len() != header.len() {
            return Err(DataError::Ragged {
                row: row_no,
                expected: header.len(),
                found: rec.len(),
            });
        }
        let raw_label = &rec[label_idx];
        let label = label_map.get(raw_label).ok_or_else(|| DataError::UnmappedLabel {
            row: row_no,
            value: raw_label.to_string(),
        })?;
        let mut row = Vec::with_capacity(names.len());
        for (j, cell) in rec.iter().enumerate() {
            if j == label_idx {
                continue;
            }
            if cell.is_empty() {
                return Err(DataError::MissingValue {
                    row: row_no,
                    column: header[j].clone(),
                });
            }
            let v: T = cell
                .parse()
                .ok()
                .filter(|v: &T| v.is_finite())
                .ok_or_else(|| DataError::NonNumeric {
                    row: row_no,
                    column: header[j].clone(),
                    value: cell.to_string(),
                })?;
            row.push(v);
        }
        rows.push(row);
        labels.push(label);
    }
    Dataset::new(names, rows, labels)
}

/// Deterministic shuffled partition of `0..n` into (train, test) index
/// lists, each sorted ascending.
pub fn split_indices(n: usize, train_fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>), DataError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DataError::BadFraction(train_fraction));
    }
    let n_train = (train_fraction * n as f64).round() as usize;
    if n_train == 0 {
        return Err(DataError::EmptySplit { split: "train" });
    }
    if n_train >= n {
        return Err(DataError::EmptySplit { split: "test" });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Splits into (train, test). Schema statistics come from the train rows only
/// and are shared by both halves.
pub fn split<T: Scalar>(ds: &Dataset<T>, train_fraction: f64, seed: u64) -> Result<(Dataset<T>, Dataset<T>), DataError> {
    let (train_idx, test_idx) = split_indices(ds.len(), train_fraction, seed)?;
    let take = |idx: &[usize]| -> (Vec<Vec<T>>, Vec<Sign>) {
        (
            idx.iter().map(|&i| ds.rows[i].clone()).collect(),
            idx.iter().map(|&i| ds.labels[i]).collect(),
        )
    };
    let (train_rows, train_labels) = take(&train_idx);
    let (test_rows, test_labels) = take(&test_idx);
    let train = Dataset::new(ds.feature_names(), train_rows, train_labels)?;
    let test = Dataset::with_schema(test_rows, test_labels, train.schema.clone());
    for (part, name) in [(&train, "train"), (&test, "test")] {
        for class in [Sign::Negative, Sign::Positive] {
            if !part.has_class(class) {
                return Err(DataError::ClassAbsent { class, split: name });
            }
        }
    }
    Ok((train, test))
}

/// Per-feature (mean, population stddev) with constant features excluded.
pub fn standardize_distance_stats<T: Scalar>(ds: &Dataset<T>) -> Result<Vec<FeatureStats<T>>, DataError> {
    if ds.is_empty() {
        return Err(DataError::Empty);
    }
    Ok(FeatureStats::from_schema(&ds.schema))
}
