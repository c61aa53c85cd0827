//! File-level pipeline: CSV in, sketched CSV plus JSON sidecar out.
//!
//! Features are built from the file (numeric columns verbatim, categorical
//! columns as CA scores), min-max normalized, and sketched by rows, columns or
//! both. The output keeps raw cells of the original file at the retained
//! positions, so every sketched value round-trips to its source.

pub mod generate;
pub mod ingest;
pub mod report;
pub mod search;
pub mod sidecar;

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bounds::{check_columns, check_rows, verify_bounds, BoundReport, SketchOrder};
use crate::cols::{sketch_columns, ColSketch, ColSketchConfig, ColumnEngine, TraceStep};
use crate::error::{Result, SketchError};
use crate::matrix::{normalize_columns, pair_count, Matrix, NormalizationParams};
use crate::rows::{assign_to_exemplars, sketch_rows, Radius, RowSketch, RowSketchConfig, VisitOrder};

pub use ingest::{
    build_dataset, ingest_csv, read_table, read_table_file, CategoricalSpec, ColumnKind, Dataset,
    FeatureInfo, NaPolicy, Table, WEIGHT_COLUMN,
};
pub use generate::{generate_table, Synthetic};
pub use search::{radius_search, RadiusSearch};
pub use sidecar::{sidecar_path, write_atomic, SketchSidecar, TraceEntry};

/// Cached per-column distance arrays are kept below this many floats.
pub const COLUMN_CACHE_BUDGET: usize = 25_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Both,
    RowsOnly,
    ColsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OrderChoice {
    /// Rows first when there are at least as many rows as features.
    #[default]
    Auto,
    RowsFirst,
    ColsFirst,
}

impl OrderChoice {
    pub fn resolve(self, n: usize, p: usize) -> SketchOrder {
        match self {
            OrderChoice::Auto if n >= p => SketchOrder::RowsFirst,
            OrderChoice::Auto => SketchOrder::ColsFirst,
            OrderChoice::RowsFirst => SketchOrder::RowsFirst,
            OrderChoice::ColsFirst => SketchOrder::ColsFirst,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub radius: Radius,
    /// Replaces `radius` with a bisection for this many exemplars.
    pub target_rows: Option<usize>,
    pub max_correlation: f64,
    pub max_columns: Option<usize>,
    pub order: OrderChoice,
    pub mode: Mode,
    pub normalize: bool,
    pub categorical: CategoricalSpec,
    pub na_policy: NaPolicy,
    pub seed: Option<u64>,
    /// Visit rows in a seeded random order instead of file order.
    pub shuffle: bool,
    pub emit_members: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            radius: Radius::Auto,
            target_rows: None,
            max_correlation: 0.95,
            max_columns: None,
            order: OrderChoice::Auto,
            mode: Mode::Both,
            normalize: true,
            categorical: CategoricalSpec::Auto,
            na_policy: NaPolicy::Reject,
            seed: None,
            shuffle: false,
            emit_members: false,
        }
    }
}

impl PipelineConfig {
    pub fn visit_order(&self) -> VisitOrder {
        if self.shuffle {
            VisitOrder::ShuffledWithSeed(self.seed.unwrap_or(0))
        } else {
            VisitOrder::Sequential
        }
    }
}

/// Sketched CSV bytes and the matching sidecar.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub csv: Vec<u8>,
    pub sidecar: SketchSidecar,
}

impl PipelineOutput {
    pub fn invariants_held(&self) -> bool {
        self.sidecar.invariants_held
    }

    /// Writes the CSV to `out` and the sidecar next to it, both atomically.
    pub fn write(&self, out: &Path) -> Result<()> {
        write_atomic(out, &self.csv)?;
        write_atomic(&sidecar_path(out), self.sidecar.to_json()?.as_bytes())
    }
}

pub fn normalized_features(ds: &Dataset, normalize: bool) -> Result<(Matrix, NormalizationParams)> {
    if normalize {
        normalize_columns(&ds.features)
    } else {
        Ok((ds.features.clone(), NormalizationParams::identity(ds.features.n_cols())))
    }
}

struct Sketches {
    order: Option<SketchOrder>,
    rows: Option<RowSketch>,
    search: Option<RadiusSearch>,
    cols: Option<ColSketch>,
    notes: Vec<String>,
}

fn row_stage(cfg: &PipelineConfig, x: &Matrix) -> Result<(RowSketch, Option<RadiusSearch>)> {
    let order = cfg.visit_order();
    match cfg.target_rows {
        Some(target) => {
            let s = radius_search(x, target, order)?;
            let rows = sketch_rows(
                x,
                &RowSketchConfig {
                    radius: Radius::Fixed(s.radius),
                    visit_order: order,
                },
            )?;
            Ok((rows, Some(s)))
        }
        None => Ok((
            sketch_rows(
                x,
                &RowSketchConfig {
                    radius: cfg.radius,
                    visit_order: order,
                },
            )?,
            None,
        )),
    }
}

/// Pairwise arrays while they fit the cache budget, column moments beyond.
pub fn column_engine(x: &Matrix) -> ColumnEngine {
    if x.n_cols().saturating_mul(pair_count(x.n_rows())) <= COLUMN_CACHE_BUDGET {
        ColumnEngine::Cached
    } else {
        ColumnEngine::Moments
    }
}

fn col_stage(cfg: &PipelineConfig, x: &Matrix) -> Result<ColSketch> {
    sketch_columns(
        x,
        &ColSketchConfig {
            max_correlation: cfg.max_correlation,
            max_columns: cfg.max_columns,
            engine: column_engine(x),
        },
    )
}

fn run_sketches(cfg: &PipelineConfig, x: &Matrix) -> Result<Sketches> {
    let mut notes = Vec::new();
    let mut out = Sketches {
        order: None,
        rows: None,
        search: None,
        cols: None,
        notes: Vec::new(),
    };
    match cfg.mode {
        Mode::RowsOnly => {
            let (rows, search) = row_stage(cfg, x)?;
            out.rows = Some(rows);
            out.search = search;
        }
        Mode::ColsOnly => out.cols = Some(col_stage(cfg, x)?),
        Mode::Both => {
            let order = cfg.order.resolve(x.n_rows(), x.n_cols());
            out.order = Some(order);
            match order {
                SketchOrder::RowsFirst => {
                    let (rows, search) = row_stage(cfg, x)?;
                    if rows.m() >= 2 {
                        out.cols = Some(col_stage(cfg, &x.select_rows(&rows.exemplar_indices)?)?);
                    } else {
                        notes.push("a single exemplar remains; column sketch skipped".into());
                    }
                    out.rows = Some(rows);
                    out.search = search;
                }
                SketchOrder::ColsFirst => {
                    let cols = col_stage(cfg, x)?;
                    let (rows, search) = row_stage(cfg, &x.select_columns(&cols.selected)?)?;
                    out.cols = Some(cols);
                    out.rows = Some(rows);
                    out.search = search;
                }
            }
        }
    }
    if let Some(s) = &out.search {
        if !s.converged {
            notes.push(format!(
                "radius search did not reach {} exemplars within {} iterations; best found gives {}",
                s.target, s.iterations, s.achieved_m
            ));
        }
    }
    out.notes = notes;
    Ok(out)
}

fn all_columns(p: usize) -> ColSketch {
    ColSketch {
        selected: (0..p).collect(),
        achieved_correlation: 1.0,
        trace: Vec::new(),
    }
}

fn bound_report(
    mode: Mode,
    order: Option<SketchOrder>,
    x: &Matrix,
    rows: Option<&RowSketch>,
    cols: Option<&ColSketch>,
) -> Result<BoundReport> {
    match (mode, rows, cols) {
        (Mode::RowsOnly, Some(r), _) => Ok(BoundReport {
            rows: Some(check_rows(x, r)?),
            columns: None,
        }),
        (Mode::ColsOnly, _, Some(c)) => Ok(BoundReport {
            rows: None,
            columns: Some(check_columns(x, c)?),
        }),
        (Mode::Both, Some(r), c) => {
            let order = order.unwrap_or(SketchOrder::RowsFirst);
            match c {
                Some(c) => verify_bounds(x, r, c, order),
                None => verify_bounds(x, r, &all_columns(x.n_cols()), order),
            }
        }
        _ => Err(SketchError::usage("sketch state does not match the pipeline mode")),
    }
}

/// Runs the configured sketches on an ingested dataset.
pub fn run_pipeline(cfg: &PipelineConfig, ds: &Dataset) -> Result<PipelineOutput> {
    let (x, normalization) = normalized_features(ds, cfg.normalize)?;
    let sk = run_sketches(cfg, &x)?;
    let bounds = bound_report(cfg.mode, sk.order, &x, sk.rows.as_ref(), sk.cols.as_ref())?;
    let mut notes = sk.notes;
    if !ds.dropped_rows.is_empty() {
        notes.push(format!("{} rows with missing values dropped", ds.dropped_rows.len()));
    }

    let n = ds.kept_rows.len();
    let (a, weights, members) = match &sk.rows {
        Some(r) => (
            r.exemplar_indices.iter().map(|&i| ds.kept_rows[i]).collect::<Vec<_>>(),
            r.weights.clone(),
            cfg.emit_members.then(|| {
                r.members
                    .iter()
                    .map(|m| m.iter().map(|&i| ds.kept_rows[i]).collect())
                    .collect()
            }),
        ),
        None => (
            ds.kept_rows.clone(),
            vec![1; n],
            cfg.emit_members.then(|| ds.kept_rows.iter().map(|&i| vec![i]).collect()),
        ),
    };
    let b: Vec<usize> = match &sk.cols {
        Some(c) => c
            .selected
            .iter()
            .map(|&f| ds.feature_info[f].source)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
        None => (0..ds.table.n_cols()).collect(),
    };
    let b_names: Vec<String> = b.iter().map(|&j| ds.table.header[j].clone()).collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(b_names.iter().map(String::as_str).chain([WEIGHT_COLUMN]))?;
    for (&i, &wt) in a.iter().zip(&weights) {
        let cells = b.iter().map(|&j| ds.table.cells[i][j].clone());
        w.write_record(cells.chain([wt.to_string()]))?;
    }
    let csv = w.into_inner().map_err(|e| SketchError::Io(e.into_error()))?;

    let weights_ok = weights.iter().sum::<usize>() == n;
    if !weights_ok {
        notes.push("weights do not sum to the retained row count".into());
    }
    if !bounds.all_hold() {
        notes.push("a distance bound check failed; see bounds".into());
    }
    let invariants_held = weights_ok && bounds.all_hold();

    let trace = sk
        .cols
        .as_ref()
        .map(|c| {
            c.trace
                .iter()
                .map(|t| TraceEntry {
                    feature: t.column,
                    name: ds.feature_info[t.column].name.clone(),
                    source: ds.feature_info[t.column].source,
                    correlation: t.correlation,
                })
                .collect()
        })
        .unwrap_or_default();

    let sidecar = SketchSidecar {
        schema_version: sidecar::SCHEMA_VERSION,
        tool: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        input: sidecar::InputSummary {
            rows: ds.table.n_rows(),
            columns: ds.table.header.clone(),
            kinds: ds.kinds.clone(),
            dropped_rows: ds.dropped_rows.clone(),
        },
        config: cfg.clone(),
        order: sk.order,
        a,
        b,
        b_names,
        weights,
        members,
        radius_used: sk.rows.as_ref().map(|r| r.radius_used),
        radius_search: sk.search,
        achieved_correlation: sk.cols.as_ref().map(|c| c.achieved_correlation),
        trace,
        row_exemplars: sk.rows.as_ref().map(|r| r.exemplar_indices.clone()),
        selected_features: sk.cols.as_ref().map(|c| c.selected.clone()),
        features: ds.feature_info.clone(),
        normalization,
        encodings: ds.encodings.clone(),
        bounds,
        seed: cfg.seed,
        conventions: sidecar::Conventions::default(),
        notes,
        invariants_held,
    };
    Ok(PipelineOutput { csv, sidecar })
}

/// Reads `input`, runs the pipeline and writes `out` plus its sidecar.
pub fn sketch_file(cfg: &PipelineConfig, input: &Path, out: &Path) -> Result<PipelineOutput> {
    let ds = ingest_csv(input, &cfg.categorical, cfg.na_policy)?;
    let output = run_pipeline(cfg, &ds)?;
    output.write(out)?;
    Ok(output)
}

/// Rebuilds the sketches recorded in a sidecar against the original data and
/// recomputes the bound report.
pub fn recompute_bounds(ds: &Dataset, sc: &SketchSidecar) -> Result<BoundReport> {
    let cfg = &sc.config;
    if ds.kept_rows.len() + ds.dropped_rows.len() != sc.input.rows
        || ds.table.header != sc.input.columns
    {
        return Err(SketchError::usage("sidecar was written for a different input file"));
    }
    let (x, normalization) = normalized_features(ds, cfg.normalize)?;
    if normalization != sc.normalization || ds.feature_info != sc.features {
        return Err(SketchError::usage("sidecar features do not match the input file"));
    }
    let cols = match &sc.selected_features {
        Some(sel) => Some(ColSketch {
            selected: sel.clone(),
            achieved_correlation: sc
                .achieved_correlation
                .ok_or_else(|| SketchError::usage("sidecar lacks the achieved correlation"))?,
            trace: sc
                .trace
                .iter()
                .map(|t| TraceStep {
                    column: t.feature,
                    correlation: t.correlation,
                })
                .collect(),
        }),
        None => None,
    };
    let rows = match (&sc.row_exemplars, sc.radius_used) {
        (Some(ex), Some(r)) => {
            let space = match (sc.order, &cols) {
                (Some(SketchOrder::ColsFirst), Some(c)) => x.select_columns(&c.selected)?,
                _ => x.clone(),
            };
            Some(assign_to_exemplars(&space, ex, r)?)
        }
        _ => None,
    };
    bound_report(cfg.mode, sc.order, &x, rows.as_ref(), cols.as_ref())
}
