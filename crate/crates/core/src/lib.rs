//! Distance-preserving sketches of dense numeric matrices.
//!
//! A data matrix is reduced in two independent steps:
//!
//! * [`rows`] covers the rows with Euclidean balls of a fixed radius in one
//!   pass and keeps one original row (the exemplar) per ball, weighted by the
//!   number of rows it stands for;
//! * [`cols`] greedily keeps original columns until the squared distances they
//!   span are nearly proportional to those of all columns.
//!
//! [`bounds`] measures how far squared distances move under each step and
//! compares that with the worst-case bounds, [`stats`] summarizes weighted
//! sketches, [`eval`] holds baselines and synthetic data, and [`pipeline`]
//! ties everything to CSV files and a JSON sidecar.

pub mod bounds;
pub mod categorical;
pub mod cli;
pub mod cols;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod pipeline;
pub mod rows;
pub mod stats;

pub use bounds::{verify_bounds, BoundReport, SketchOrder};
pub use cols::{project_columns, sketch_columns, ColSketch, ColSketchConfig, ColumnEngine};
pub use error::{Result, SketchError};
pub use matrix::{
    accumulate, condensed_sq_dist, condensed_sq_dist_column, euclidean_distance,
    frobenius_correlation, normalize_columns, CondensedDistances, Matrix, NormalizationParams,
};
pub use rows::{default_radius, exemplar_matrix, sketch_rows, Radius, RowSketch, RowSketchConfig, VisitOrder};
pub use stats::{weighted_summary, WeightedSummary};
