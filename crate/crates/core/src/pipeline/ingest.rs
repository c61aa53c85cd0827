//! CSV ingestion: raw cells, column typing, missing values and feature building.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::categorical::{encode, CAEncoding, CategoricalColumn};
use crate::error::{Result, SketchError};
use crate::matrix::Matrix;

/// Name of the weight column appended to sketched output.
pub const WEIGHT_COLUMN: &str = "__weight";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CategoricalSpec {
    /// Any column holding a non-numeric token is categorical.
    #[default]
    Auto,
    /// Exactly these columns are categorical.
    Declared(Vec<String>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NaPolicy {
    #[default]
    Reject,
    DropRows,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

/// Header plus raw cells, exactly as read.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub cells: Vec<Vec<String>>,
}

impl Table {
    pub fn n_rows(&self) -> usize {
        self.cells.len()
    }

    pub fn n_cols(&self) -> usize {
        self.header.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn write<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.cells {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// One feature column of the numeric matrix handed to the sketchers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureInfo {
    pub name: String,
    /// Index of the originating file column.
    pub source: usize,
    /// CA component for categorical sources.
    pub component: Option<usize>,
}

/// A parsed file: raw table, retained rows, and the numeric feature matrix.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub table: Table,
    pub kinds: Vec<ColumnKind>,
    /// File row (0-based, header excluded) behind each feature row.
    pub kept_rows: Vec<usize>,
    pub dropped_rows: Vec<usize>,
    /// Un-normalized, `kept_rows.len() x features.len()`.
    pub features: Matrix,
    pub feature_info: Vec<FeatureInfo>,
    pub encodings: BTreeMap<String, CAEncoding>,
}

impl Dataset {
    /// Numeric value of a cell known to lie in a numeric column.
    pub fn numeric_cell(&self, row: usize, col: usize) -> f64 {
        parse_number(&self.table.cells[row][col]).unwrap_or(f64::NAN)
    }

    pub fn numeric_columns(&self) -> Vec<usize> {
        (0..self.kinds.len())
            .filter(|&j| self.kinds[j] == ColumnKind::Numeric)
            .collect()
    }
}

pub fn is_missing(token: &str) -> bool {
    let t = token.trim();
    t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan")
}

fn parse_number(token: &str) -> Option<f64> {
    token.trim().parse::<f64>().ok()
}

/// Reads a header-first comma-separated table, rejecting ragged rows.
pub fn read_table<R: Read>(reader: R, source: &str) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.is_empty() || header.iter().all(|h| h.trim().is_empty()) {
        return Err(SketchError::Data {
            location: format!("{source}, line 1"),
            message: "missing header row".into(),
        });
    }
    for (j, h) in header.iter().enumerate() {
        if h == WEIGHT_COLUMN {
            return Err(SketchError::Data {
                location: format!("{source}, line 1, column {}", j + 1),
                message: format!("input column {WEIGHT_COLUMN:?} collides with the output weight column"),
            });
        }
        if header[..j].contains(h) {
            return Err(SketchError::Data {
                location: format!("{source}, line 1, column {}", j + 1),
                message: format!("duplicate column name {h:?}"),
            });
        }
    }
    let mut cells = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != header.len() {
            let line = record.position().map_or(0, |p| p.line());
            return Err(SketchError::Data {
                location: format!("{source}, line {line}"),
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        cells.push(record.iter().map(str::to_string).collect());
    }
    Ok(Table { header, cells })
}

pub fn read_table_file(path: &Path) -> Result<Table> {
    let file = File::open(path).map_err(|source| SketchError::Unreadable {
        path: path.to_path_buf(),
        source,
    })?;
    read_table(std::io::BufReader::new(file), &path.display().to_string())
}

fn classify(table: &Table, spec: &CategoricalSpec) -> Result<Vec<ColumnKind>> {
    let non_numeric = |j: usize| {
        table
            .cells
            .iter()
            .position(|row| !is_missing(&row[j]) && parse_number(&row[j]).is_none())
    };
    match spec {
        CategoricalSpec::Auto => Ok((0..table.n_cols())
            .map(|j| {
                if non_numeric(j).is_some() {
                    ColumnKind::Categorical
                } else {
                    ColumnKind::Numeric
                }
            })
            .collect()),
        CategoricalSpec::Declared(names) => {
            for name in names {
                if table.column_index(name).is_none() {
                    return Err(SketchError::usage(format!(
                        "declared categorical column {name:?} is not in the header"
                    )));
                }
            }
            (0..table.n_cols())
                .map(|j| {
                    if names.contains(&table.header[j]) {
                        return Ok(ColumnKind::Categorical);
                    }
                    match non_numeric(j) {
                        None => Ok(ColumnKind::Numeric),
                        Some(i) => Err(SketchError::Data {
                            location: format!("row {i}, column {:?}", table.header[j]),
                            message: format!(
                                "non-numeric value {:?} in a column not declared categorical",
                                table.cells[i][j]
                            ),
                        }),
                    }
                })
                .collect()
        }
    }
}

/// Types every column, applies the missing-value policy and builds features.
///
/// Numeric columns become one feature each; categorical columns contribute
/// their correspondence-analysis score columns.
pub fn build_dataset(table: Table, spec: &CategoricalSpec, na: NaPolicy) -> Result<Dataset> {
    let kinds = classify(&table, spec)?;
    let mut kept_rows = Vec::new();
    let mut dropped_rows = Vec::new();
    'rows: for (i, row) in table.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let bad = is_missing(cell)
                || (kinds[j] == ColumnKind::Numeric
                    && !parse_number(cell).is_some_and(f64::is_finite));
            if bad {
                match na {
                    NaPolicy::Reject => {
                        return Err(SketchError::NonFinite {
                            row: i,
                            column: table.header[j].clone(),
                        })
                    }
                    NaPolicy::DropRows => {
                        dropped_rows.push(i);
                        continue 'rows;
                    }
                }
            }
        }
        kept_rows.push(i);
    }
    if kept_rows.is_empty() {
        return Err(SketchError::Data {
            location: "whole file".into(),
            message: "no complete data rows".into(),
        });
    }

    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut feature_info = Vec::new();
    let mut encodings = BTreeMap::new();
    for (j, kind) in kinds.iter().enumerate() {
        let name = &table.header[j];
        match kind {
            ColumnKind::Numeric => {
                columns.push(
                    kept_rows
                        .iter()
                        .map(|&i| parse_number(&table.cells[i][j]).expect("checked above"))
                        .collect(),
                );
                feature_info.push(FeatureInfo {
                    name: name.clone(),
                    source: j,
                    component: None,
                });
            }
            ColumnKind::Categorical => {
                let values = kept_rows
                    .iter()
                    .map(|&i| table.cells[i][j].trim().to_string())
                    .collect();
                let (enc, scores) = encode(&CategoricalColumn::new(name.clone(), values))?;
                for k in 0..enc.retained {
                    columns.push(scores.column(k));
                    feature_info.push(FeatureInfo {
                        name: format!("{name}#{}", k + 1),
                        source: j,
                        component: Some(k),
                    });
                }
                encodings.insert(name.clone(), enc);
            }
        }
    }
    if columns.is_empty() {
        return Err(SketchError::Degenerate {
            module: "cli",
            condition: "no usable feature columns (every categorical column has one level)".into(),
        });
    }
    let features = Matrix::from_columns(&columns)?
        .with_col_labels(feature_info.iter().map(|f| f.name.clone()).collect())?;
    Ok(Dataset {
        table,
        kinds,
        kept_rows,
        dropped_rows,
        features,
        feature_info,
        encodings,
    })
}

pub fn ingest_csv(path: &Path, spec: &CategoricalSpec, na: NaPolicy) -> Result<Dataset> {
    build_dataset(read_table_file(path)?, spec, na)
}
