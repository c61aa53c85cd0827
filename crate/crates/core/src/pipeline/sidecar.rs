//! The JSON document written next to every sketched CSV.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ingest::{ColumnKind, FeatureInfo};
use super::search::RadiusSearch;
use super::PipelineConfig;
use crate::bounds::{BoundReport, SketchOrder};
use crate::categorical::CAEncoding;
use crate::error::{Result, SketchError};
use crate::matrix::NormalizationParams;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    /// Data rows in the file, header excluded.
    pub rows: usize,
    pub columns: Vec<String>,
    pub kinds: Vec<ColumnKind>,
    pub dropped_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub feature: usize,
    pub name: String,
    pub source: usize,
    pub correlation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub indices: String,
    pub weight_column: String,
    pub variance: String,
    pub median: String,
    pub normalization: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            indices: "0-based data rows (header excluded) and 0-based file columns".into(),
            weight_column: super::ingest::WEIGHT_COLUMN.into(),
            variance: "weighted, denominator = sum of weights".into(),
            median: "lower weighted median".into(),
            normalization: "per-feature min-max to [0, 1]; constant features map to 0".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SketchSidecar {
    pub schema_version: u32,
    pub tool: String,
    pub input: InputSummary,
    pub config: PipelineConfig,
    pub order: Option<SketchOrder>,
    /// Retained file rows, one per exemplar, in creation order.
    pub a: Vec<usize>,
    /// Retained file columns, ascending.
    pub b: Vec<usize>,
    pub b_names: Vec<String>,
    pub weights: Vec<usize>,
    /// File rows represented by each retained row.
    pub members: Option<Vec<Vec<usize>>>,
    pub radius_used: Option<f64>,
    pub radius_search: Option<RadiusSearch>,
    pub achieved_correlation: Option<f64>,
    pub trace: Vec<TraceEntry>,
    /// Exemplars as indices into the retained-row feature matrix.
    pub row_exemplars: Option<Vec<usize>>,
    /// Selected feature indices, in selection order.
    pub selected_features: Option<Vec<usize>>,
    pub features: Vec<FeatureInfo>,
    pub normalization: NormalizationParams,
    pub encodings: BTreeMap<String, CAEncoding>,
    pub bounds: BoundReport,
    pub seed: Option<u64>,
    pub conventions: Conventions,
    pub notes: Vec<String>,
    pub invariants_held: bool,
}

impl SketchSidecar {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        if s.schema_version != SCHEMA_VERSION {
            return Err(SketchError::usage(format!(
                "sidecar schema version {} is not supported (expected {SCHEMA_VERSION})",
                s.schema_version
            )));
        }
        Ok(s)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| SketchError::Unreadable {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }
}

/// `out.csv` -> `out.sketch.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("sketch.json")
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| SketchError::usage(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(SketchError::from)
}
