//! Worst-case discrepancy bounds for the row and column sketches, and the
//! measured discrepancies they are meant to dominate.
//!
//! All quantities are in normalized units: with every column in `[0, 1]` a
//! squared distance over `p` columns lies in `[0, p]`.
//!
//! * Rows: replacing every row by its exemplar changes any squared distance by
//!   at most `4 sqrt(p) r`; summed over pairs, by `4 sqrt(p) r (n - K)(n - 1)`
//!   with `K` exemplars.
//! * Columns: keeping the selected columns changes any squared distance by at
//!   most `m p sqrt(1 - eps^2)` when the correlation reached is `eps`.
//!
//! The column inequality rests on `|A - B|_F <= max(|A|_F, |B|_F) sin(A, B)`,
//! which holds only when the lengths of both arrays are comparable. It can
//! fail for very small `m`: with two rows the condensed array has one entry,
//! any non-constant column gives a cosine of exactly 1 and a bound of 0, while
//! the dropped columns still contribute. [`BoundReport`] records whether each
//! inequality held instead of assuming it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cols::ColSketch;
use crate::error::{Result, SketchError};
use crate::matrix::{
    check_same_size, condensed_pair, pair_count, squared_distance, CondensedDistances, Matrix,
};
use crate::rows::RowSketch;

/// Row pairs above this count are checked on a seeded sample instead of exhaustively.
pub const EXACT_PAIR_LIMIT: usize = 20_000_000;
const SAMPLED_PAIRS: usize = 2_000_000;
const SAMPLE_SEED: u64 = 0x5eed;

/// Tolerance for floating-point noise when comparing a measurement to a bound.
const BOUND_SLACK: f64 = 1e-9;

/// Largest squared-distance change one row replacement can cause.
pub fn row_pairwise_bound(p: usize, r: f64) -> f64 {
    4.0 * (p as f64).sqrt() * r
}

/// Bound on the summed absolute change over all pairs with `k` exemplars.
pub fn row_total_bound(n: usize, k: usize, p: usize, r: f64) -> Result<f64> {
    if k == 0 || k > n {
        return Err(SketchError::usage(format!(
            "exemplar count {k} must lie in 1..={n}"
        )));
    }
    Ok(row_pairwise_bound(p, r) * (n - k) as f64 * (n - 1) as f64)
}

/// Column-selection bound `m p sqrt(1 - eps^2)`.
pub fn column_bound(m: usize, p: usize, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(SketchError::usage(format!(
            "epsilon {epsilon} outside (0, 1]"
        )));
    }
    Ok((m * p) as f64 * (1.0 - epsilon * epsilon).max(0.0).sqrt())
}

/// Largest absolute entrywise difference and the pair `(i, j)`, `i < j`, attaining it.
pub fn empirical_max_sq_discrepancy(
    full: &CondensedDistances,
    reduced: &CondensedDistances,
) -> Result<(f64, (usize, usize))> {
    check_same_size(full, reduced)?;
    if full.is_empty() {
        return Err(SketchError::usage("no pairs to compare"));
    }
    let mut best = (0.0, 0);
    for (k, (a, b)) in full.as_slice().iter().zip(reduced.as_slice()).enumerate() {
        let d = (a - b).abs();
        if d > best.0 {
            best = (d, k);
        }
    }
    Ok((best.0, condensed_pair(full.m(), best.1)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowBoundCheck {
    pub n: usize,
    pub p: usize,
    /// Exemplar count K(r).
    pub k_r: usize,
    pub radius: f64,
    pub pairwise_bound: f64,
    pub total_bound: f64,
    pub empirical_max: f64,
    pub argmax_pair: (usize, usize),
    /// Summed |d^2 - d^2_R| over the checked pairs.
    pub empirical_total: f64,
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub exemplar_pairs_exact: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnBoundCheck {
    pub m: usize,
    pub p: usize,
    pub k: usize,
    pub epsilon: f64,
    /// `m * p`, the largest Frobenius norm of an `m x m` array with entries in `[0, p]`.
    pub constant: f64,
    pub bound: f64,
    pub empirical_max: f64,
    pub argmax_pair: (usize, usize),
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub rows: Option<RowBoundCheck>,
    pub columns: Option<ColumnBoundCheck>,
}

impl BoundReport {
    pub fn all_hold(&self) -> bool {
        self.rows.as_ref().is_none_or(|r| r.holds) && self.columns.as_ref().is_none_or(|c| c.holds)
    }
}

/// Compares a normalized matrix with its row-reduced version, in which every
/// row is replaced by its exemplar row.
pub fn check_rows(x: &Matrix, s: &RowSketch) -> Result<RowBoundCheck> {
    let (n, p) = (x.n_rows(), x.n_cols());
    if s.n() != n {
        return Err(SketchError::usage(format!(
            "row sketch covers {} rows but the matrix has {n}",
            s.n()
        )));
    }
    let assignment = s.assignment();
    if assignment.contains(&usize::MAX) {
        return Err(SketchError::usage("row sketch leaves rows unassigned"));
    }
    if s.exemplar_indices.iter().any(|&e| e >= n) {
        return Err(SketchError::usage("row sketch has stale exemplar indices"));
    }
    let owner: Vec<usize> = assignment.iter().map(|&slot| s.exemplar_indices[slot]).collect();
    let mut is_exemplar = vec![false; n];
    for &e in &s.exemplar_indices {
        is_exemplar[e] = true;
    }

    let mut max = (0.0f64, (0usize, 1usize.min(n.saturating_sub(1))));
    let mut total = 0.0;
    let mut exemplar_exact = true;
    let mut visit = |i: usize, j: usize| {
        let d = squared_distance(x.row(i), x.row(j));
        let dr = squared_distance(x.row(owner[i]), x.row(owner[j]));
        let diff = (d - dr).abs();
        total += diff;
        if diff > max.0 {
            max = (diff, (i, j));
        }
        if is_exemplar[i] && is_exemplar[j] && diff != 0.0 {
            exemplar_exact = false;
        }
    };

    let pairs = n * n.saturating_sub(1) / 2;
    let exhaustive = pairs <= EXACT_PAIR_LIMIT;
    let pairs_checked = if exhaustive {
        for i in 0..n {
            for j in i + 1..n {
                visit(i, j);
            }
        }
        pairs
    } else {
        let mut checked = 0;
        // exemplar pairs first so the exactness flag covers them all when few
        let ex = &s.exemplar_indices;
        if ex.len() * ex.len() / 2 <= SAMPLED_PAIRS / 2 {
            for a in 0..ex.len() {
                for b in a + 1..ex.len() {
                    visit(ex[a].min(ex[b]), ex[a].max(ex[b]));
                    checked += 1;
                }
            }
        }
        sample_pairs(n, SAMPLED_PAIRS, &mut visit);
        checked + SAMPLED_PAIRS
    };

    let radius = s.radius_used;
    let pairwise_bound = row_pairwise_bound(p, radius);
    let total_bound = row_total_bound(n, s.m(), p, radius)?;
    let holds = max.0 <= pairwise_bound + BOUND_SLACK
        && total <= total_bound + BOUND_SLACK * pairs_checked as f64
        && exemplar_exact;
    Ok(RowBoundCheck {
        n,
        p,
        k_r: s.m(),
        radius,
        pairwise_bound,
        total_bound,
        empirical_max: max.0,
        argmax_pair: max.1,
        empirical_total: total,
        pairs_checked,
        exhaustive,
        exemplar_pairs_exact: exemplar_exact,
        holds,
    })
}

/// Compares a normalized matrix with the submatrix of its selected columns.
///
/// Pairs are streamed, exhaustively up to [`EXACT_PAIR_LIMIT`] and on a seeded
/// sample beyond it.
pub fn check_columns(x: &Matrix, s: &ColSketch) -> Result<ColumnBoundCheck> {
    let (m, p) = (x.n_rows(), x.n_cols());
    if m < 2 {
        return Err(SketchError::usage("column check needs at least two rows"));
    }
    let sub = x.select_columns(&s.selected)?;
    let mut max = (0.0f64, (0usize, 1usize));
    let mut visit = |i: usize, j: usize| {
        let d = squared_distance(x.row(i), x.row(j));
        let dr = squared_distance(sub.row(i), sub.row(j));
        let diff = (d - dr).abs();
        if diff > max.0 {
            max = (diff, (i, j));
        }
    };
    let pairs = pair_count(m);
    let exhaustive = pairs <= EXACT_PAIR_LIMIT;
    let pairs_checked = if exhaustive {
        for i in 0..m {
            for j in i + 1..m {
                visit(i, j);
            }
        }
        pairs
    } else {
        sample_pairs(m, SAMPLED_PAIRS, &mut visit);
        SAMPLED_PAIRS
    };
    let epsilon = s.achieved_correlation;
    let bound = column_bound(m, p, epsilon)?;
    Ok(ColumnBoundCheck {
        m,
        p,
        k: s.k(),
        epsilon,
        constant: (m * p) as f64,
        bound,
        empirical_max: max.0,
        argmax_pair: max.1,
        pairs_checked,
        exhaustive,
        holds: max.0 <= bound + BOUND_SLACK,
    })
}

/// Visits `count` seeded random pairs `(i, j)`, `i < j`, with repetition.
fn sample_pairs(n: usize, count: usize, visit: &mut impl FnMut(usize, usize)) {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut done = 0;
    while done < count {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i != j {
            visit(i.min(j), i.max(j));
            done += 1;
        }
    }
}

/// Which sketch ran first in a combined pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SketchOrder {
    RowsFirst,
    ColsFirst,
}

/// Assembles both checks for a combined sketch of a normalized matrix.
///
/// Rows first: the row check runs on all columns and the column check on the
/// exemplar rows. Columns first: the column check runs on all rows and the row
/// check on the selected columns.
pub fn verify_bounds(
    normalized: &Matrix,
    row_sketch: &RowSketch,
    col_sketch: &ColSketch,
    order: SketchOrder,
) -> Result<BoundReport> {
    match order {
        SketchOrder::RowsFirst => {
            let rows = check_rows(normalized, row_sketch)?;
            let exemplars = normalized.select_rows(&row_sketch.exemplar_indices)?;
            let columns = if exemplars.n_rows() >= 2 {
                Some(check_columns(&exemplars, col_sketch)?)
            } else {
                None
            };
            Ok(BoundReport {
                rows: Some(rows),
                columns,
            })
        }
        SketchOrder::ColsFirst => {
            let columns = check_columns(normalized, col_sketch)?;
            let sub = normalized.select_columns(&col_sketch.selected)?;
            let rows = check_rows(&sub, row_sketch)?;
            Ok(BoundReport {
                rows: Some(rows),
                columns: Some(columns),
            })
        }
    }
}
