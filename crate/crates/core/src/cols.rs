//! Greedy forward selection of original columns.
//!
//! At every step the unselected column whose squared distances, added to those
//! of the columns already chosen, have the largest Frobenius cosine with the
//! full squared-distance array is kept. Squared distances are additive across
//! columns, so each step only needs one-dimensional distance arrays.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SketchError};
use crate::matrix::{condensed_sq_dist_column, cosine, CondensedDistances, Matrix};

/// Minimum gain in correlation for a further column to be worth adding.
pub const STALL_TOLERANCE: f64 = 1e-12;

/// How candidate correlations are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnEngine {
    /// Every per-column distance array kept in memory (`p * m(m-1)/2` floats).
    Cached,
    /// Per-column arrays rebuilt at each step; memory of two arrays.
    Recompute,
    /// Inner products of distance arrays from column moments, `O(m p^2)` time
    /// and no pairwise arrays. Equal to the pairwise engines up to rounding.
    Moments,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColSketchConfig {
    pub max_correlation: f64,
    pub max_columns: Option<usize>,
    pub engine: ColumnEngine,
}

impl Default for ColSketchConfig {
    fn default() -> Self {
        Self {
            max_correlation: 0.95,
            max_columns: None,
            engine: ColumnEngine::Cached,
        }
    }
}

impl ColSketchConfig {
    pub fn with_threshold(max_correlation: f64) -> Self {
        Self {
            max_correlation,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.max_correlation > 0.0 && self.max_correlation <= 1.0) {
            return Err(SketchError::usage(format!(
                "max correlation {} outside (0, 1]",
                self.max_correlation
            )));
        }
        if self.max_columns == Some(0) {
            return Err(SketchError::usage("max columns must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub column: usize,
    pub correlation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColSketch {
    /// Selected column indices, in selection order.
    pub selected: Vec<usize>,
    pub achieved_correlation: f64,
    pub trace: Vec<TraceStep>,
}

impl ColSketch {
    pub fn k(&self) -> usize {
        self.selected.len()
    }
}

struct ColumnDistances<'a> {
    x: &'a Matrix,
    cache: Option<Vec<CondensedDistances>>,
}

impl<'a> ColumnDistances<'a> {
    fn new(x: &'a Matrix, cache: bool) -> Result<Self> {
        let cache = if cache {
            Some(
                (0..x.n_cols())
                    .map(|j| condensed_sq_dist_column(&x.column(j)))
                    .collect::<Result<_>>()?,
            )
        } else {
            None
        };
        Ok(Self { x, cache })
    }

    fn with<T>(&self, j: usize, f: impl FnOnce(&CondensedDistances) -> T) -> Result<T> {
        match &self.cache {
            Some(c) => Ok(f(&c[j])),
            None => Ok(f(&condensed_sq_dist_column(&self.x.column(j))?)),
        }
    }

    fn full(&self) -> Result<CondensedDistances> {
        let mut full = CondensedDistances::zeros(self.x.n_rows());
        for j in 0..self.x.n_cols() {
            self.with(j, |d| full.add_assign(d))??;
        }
        Ok(full)
    }
}

/// Cosine of `accumulated + candidate` with `full`, without allocating.
fn candidate_cosine(
    accumulated: &CondensedDistances,
    candidate: &CondensedDistances,
    full: &CondensedDistances,
    full_norm: f64,
) -> f64 {
    let mut dot = 0.0;
    let mut sq = 0.0;
    for ((a, c), f) in accumulated
        .as_slice()
        .iter()
        .zip(candidate.as_slice())
        .zip(full.as_slice())
    {
        let v = a + c;
        dot += v * f;
        sq += v * v;
    }
    ratio(dot, sq.sqrt() * full_norm)
}

#[inline]
fn ratio(dot: f64, denom: f64) -> f64 {
    if denom == 0.0 {
        0.0
    } else {
        // rounding can overshoot 1 for proportional arrays
        (dot / denom).min(1.0)
    }
}

fn check_input(x: &Matrix) -> Result<()> {
    if x.n_rows() < 2 {
        return Err(SketchError::usage("column sketch needs at least two rows"));
    }
    if x.n_cols() == 0 {
        return Err(SketchError::usage("column sketch needs at least one column"));
    }
    Ok(())
}

fn all_constant() -> SketchError {
    SketchError::Degenerate {
        module: "col_sketcher",
        condition: "every column is constant, so all pairwise distances are zero".into(),
    }
}

trait Scorer {
    fn score(&self, j: usize) -> Result<f64>;
    fn add(&mut self, j: usize) -> Result<()>;
}

struct Pairwise<'a> {
    columns: ColumnDistances<'a>,
    full: CondensedDistances,
    full_norm: f64,
    accumulated: CondensedDistances,
}

impl<'a> Pairwise<'a> {
    fn new(x: &'a Matrix, cache: bool) -> Result<Self> {
        let columns = ColumnDistances::new(x, cache)?;
        let full = columns.full()?;
        Ok(Self {
            full_norm: full.norm(),
            full,
            columns,
            accumulated: CondensedDistances::zeros(x.n_rows()),
        })
    }
}

impl Scorer for Pairwise<'_> {
    fn score(&self, j: usize) -> Result<f64> {
        self.columns
            .with(j, |d| candidate_cosine(&self.accumulated, d, &self.full, self.full_norm))
    }

    fn add(&mut self, j: usize) -> Result<()> {
        let acc = &mut self.accumulated;
        self.columns.with(j, |d| acc.add_assign(d))?
    }
}

/// Gram matrix of the per-column condensed arrays.
///
/// For centered columns `a`, `b` of length `m`,
/// `sum_{i<l} (a_i - a_l)^2 (b_i - b_l)^2 = m sum a^2 b^2 + sum a^2 sum b^2 + 2 (sum a b)^2`,
/// a sum of non-negative terms.
pub fn distance_gram(x: &Matrix) -> Vec<Vec<f64>> {
    let (m, p) = (x.n_rows(), x.n_cols());
    let centered: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            let c = x.column(j);
            let mean = c.iter().sum::<f64>() / m as f64;
            c.into_iter().map(|v| v - mean).collect()
        })
        .collect();
    let sq: Vec<f64> = centered.iter().map(|c| c.iter().map(|v| v * v).sum()).collect();
    let mut g = vec![vec![0.0; p]; p];
    for a in 0..p {
        for b in a..p {
            let (mut s22, mut s11) = (0.0, 0.0);
            for (u, v) in centered[a].iter().zip(&centered[b]) {
                let uv = u * v;
                s11 += uv;
                s22 += uv * uv;
            }
            let v = m as f64 * s22 + sq[a] * sq[b] + 2.0 * s11 * s11;
            g[a][b] = v;
            g[b][a] = v;
        }
    }
    g
}

struct Moments {
    gram: Vec<Vec<f64>>,
    /// Inner product of each column's array with the full array.
    with_full: Vec<f64>,
    full_norm: f64,
    dot: f64,
    sq: f64,
    /// Inner product of each column's array with the accumulated array.
    cross: Vec<f64>,
}

impl Moments {
    fn new(x: &Matrix) -> Self {
        let gram = distance_gram(x);
        let with_full: Vec<f64> = gram.iter().map(|r| r.iter().sum()).collect();
        let full_norm = with_full.iter().sum::<f64>().max(0.0).sqrt();
        let p = gram.len();
        Self {
            gram,
            with_full,
            full_norm,
            dot: 0.0,
            sq: 0.0,
            cross: vec![0.0; p],
        }
    }
}

impl Scorer for Moments {
    fn score(&self, j: usize) -> Result<f64> {
        let sq = self.sq + 2.0 * self.cross[j] + self.gram[j][j];
        Ok(ratio(self.dot + self.with_full[j], sq.max(0.0).sqrt() * self.full_norm))
    }

    fn add(&mut self, j: usize) -> Result<()> {
        self.sq += 2.0 * self.cross[j] + self.gram[j][j];
        self.dot += self.with_full[j];
        for (c, g) in self.cross.iter_mut().zip(&self.gram[j]) {
            *c += g;
        }
        Ok(())
    }
}

fn greedy(scorer: &mut dyn Scorer, p: usize, cfg: &ColSketchConfig) -> Result<ColSketch> {
    let limit = cfg.max_columns.unwrap_or(p).min(p);
    let mut chosen = vec![false; p];
    let mut selected = Vec::new();
    let mut trace = Vec::new();
    let mut previous = 0.0;
    loop {
        let mut best: Option<(usize, f64)> = None;
        for j in (0..p).filter(|&j| !chosen[j]) {
            let c = scorer.score(j)?;
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((j, c));
            }
        }
        let Some((column, correlation)) = best else {
            break;
        };
        if correlation <= previous + STALL_TOLERANCE {
            break;
        }
        chosen[column] = true;
        selected.push(column);
        scorer.add(column)?;
        trace.push(TraceStep {
            column,
            correlation,
        });
        previous = correlation;
        if correlation >= cfg.max_correlation || selected.len() >= limit {
            break;
        }
    }
    Ok(ColSketch {
        selected,
        achieved_correlation: previous,
        trace,
    })
}

/// Greedy forward column selection on a normalized matrix.
///
/// Stops once the correlation reaches `max_correlation`, when every column or
/// `max_columns` columns are selected, or when no remaining column raises the
/// correlation by more than [`STALL_TOLERANCE`]. Ties go to the lowest index.
pub fn sketch_columns(x: &Matrix, cfg: &ColSketchConfig) -> Result<ColSketch> {
    cfg.validate()?;
    check_input(x)?;
    let p = x.n_cols();
    match cfg.engine {
        ColumnEngine::Moments => {
            let mut s = Moments::new(x);
            if s.full_norm == 0.0 {
                return Err(all_constant());
            }
            greedy(&mut s, p, cfg)
        }
        engine => {
            let mut s = Pairwise::new(x, engine == ColumnEngine::Cached)?;
            if s.full_norm == 0.0 {
                return Err(all_constant());
            }
            greedy(&mut s, p, cfg)
        }
    }
}

/// Correlation every unselected column would reach if added to `selected`.
///
/// Entries for already selected columns are `None`.
pub fn candidate_correlations(x: &Matrix, selected: &[usize]) -> Result<Vec<Option<f64>>> {
    check_input(x)?;
    let columns = ColumnDistances::new(x, true)?;
    let full = columns.full()?;
    let full_norm = full.norm();
    let mut accumulated = CondensedDistances::zeros(x.n_rows());
    for &j in selected {
        if j >= x.n_cols() {
            return Err(SketchError::usage(format!("column index {j} out of range")));
        }
        columns.with(j, |d| accumulated.add_assign(d))??;
    }
    (0..x.n_cols())
        .map(|j| {
            if selected.contains(&j) {
                Ok(None)
            } else {
                columns.with(j, |d| Some(candidate_cosine(&accumulated, d, &full, full_norm)))
            }
        })
        .collect()
}

/// Correlation between the distances of the columns in `subset` and all columns.
pub fn subset_correlation(x: &Matrix, subset: &[usize]) -> Result<f64> {
    check_input(x)?;
    let columns = ColumnDistances::new(x, false)?;
    let full = columns.full()?;
    let mut acc = CondensedDistances::zeros(x.n_rows());
    for &j in subset {
        if j >= x.n_cols() {
            return Err(SketchError::usage(format!("column index {j} out of range")));
        }
        columns.with(j, |d| acc.add_assign(d))??;
    }
    Ok(cosine(acc.as_slice(), full.as_slice(), full.norm()))
}

/// The selected columns of `x`, in selection order.
pub fn project_columns(x: &Matrix, s: &ColSketch) -> Result<Matrix> {
    x.select_columns(&s.selected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{condensed_sq_dist, frobenius_correlation, normalize_columns};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn coplanar() -> Matrix {
        Matrix::from_rows(&[[0.0, 1.0, 2.0], [0.0, 4.0, 5.0], [0.0, 6.0, 9.0]]).unwrap()
    }

    fn coplanar_scaled() -> Matrix {
        Matrix::from_rows(&[
            [0.0, 1.0 / 11.0, 2.0 / 16.0],
            [0.0, 4.0 / 11.0, 5.0 / 16.0],
            [0.0, 6.0 / 11.0, 9.0 / 16.0],
        ])
        .unwrap()
    }

    // Independent per-step scan: rebuild each candidate's distances from the
    // raw matrix with a full double loop over the chosen columns.
    fn scan_step(x: &Matrix, chosen: &[usize]) -> Vec<Option<f64>> {
        let full = condensed_sq_dist(x).unwrap();
        (0..x.n_cols())
            .map(|j| {
                if chosen.contains(&j) {
                    return None;
                }
                let mut cols = chosen.to_vec();
                cols.push(j);
                let sub = x.select_columns(&cols).unwrap();
                Some(frobenius_correlation(&condensed_sq_dist(&sub).unwrap(), &full).unwrap())
            })
            .collect()
    }

    #[test]
    fn raw_coplanar_matrix() {
        // D(2) = (9, 25, 4), D(3) = (9, 49, 16), D_X = (18, 74, 20)
        let x = coplanar();
        let c = candidate_correlations(&x, &[]).unwrap();
        assert_eq!(c[0], Some(0.0));
        assert_abs_diff_eq!(c[1].unwrap(), 2092.0 / (6200.0f64 * 722.0).sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(c[2].unwrap(), 4108.0 / (6200.0f64 * 2738.0).sqrt(), epsilon = 1e-12);
        let s = sketch_columns(&x, &ColSketchConfig::default()).unwrap();
        assert_eq!(s.selected, vec![2]);
        assert_eq!(s.trace.len(), 1);
    }

    #[test]
    fn proportional_target_gives_unit_cosine() {
        // against a target proportional to D(2) its cosine is exactly 1
        let target = CondensedDistances::from_vec(3, vec![18.0, 50.0, 8.0]).unwrap();
        let d2 = condensed_sq_dist_column(&coplanar().column(1)).unwrap();
        let d3 = condensed_sq_dist_column(&coplanar().column(2)).unwrap();
        assert_abs_diff_eq!(frobenius_correlation(&target, &d2).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            frobenius_correlation(&target, &d3).unwrap(),
            5480.0 / (5776.0f64 * 5476.0).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn min_max_normalized_coplanar_keeps_second_column() {
        let (x, _) = normalize_columns(&coplanar()).unwrap();
        let s = sketch_columns(&x, &ColSketchConfig::default()).unwrap();
        assert_eq!(s.selected, vec![1]);
        assert_eq!(project_columns(&coplanar(), &s).unwrap().column(0), vec![1.0, 4.0, 6.0]);
    }

    #[test]
    fn coplanar_scaled_cosines() {
        let x = coplanar_scaled();
        let c = candidate_correlations(&x, &[]).unwrap();
        assert_eq!(c[0], Some(0.0));
        assert_abs_diff_eq!(c[1].unwrap(), 0.994101, epsilon = 1e-6);
        assert_abs_diff_eq!(c[2].unwrap(), 0.9930334, epsilon = 1e-6);
        let s = sketch_columns(&x, &ColSketchConfig::default()).unwrap();
        assert_eq!(s.selected, vec![1]);
    }

    #[test]
    fn tight_threshold_takes_two_columns() {
        let s = sketch_columns(&coplanar(), &ColSketchConfig::with_threshold(0.999)).unwrap();
        assert_eq!(s.selected, vec![2, 1]);
        let s = sketch_columns(&coplanar_scaled(), &ColSketchConfig::with_threshold(0.999))
            .unwrap();
        assert_eq!(s.selected, vec![1, 2]);
        assert_abs_diff_eq!(s.achieved_correlation, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn moment_engine_on_coplanar_examples() {
        let moments = ColSketchConfig { engine: ColumnEngine::Moments, ..ColSketchConfig::default() };
        let g = distance_gram(&coplanar());
        // D(2).D(2) = 81 + 625 + 16, D(2).D(3) = 81 + 1225 + 64
        assert_abs_diff_eq!(g[1][1], 722.0, epsilon = 1e-9);
        assert_abs_diff_eq!(g[1][2], 1370.0, epsilon = 1e-9);
        assert_eq!(g[0], vec![0.0; 3]);
        assert_eq!(sketch_columns(&coplanar(), &moments).unwrap().selected, vec![2]);
        let s = sketch_columns(&coplanar_scaled(), &moments).unwrap();
        assert_eq!(s.selected, vec![1]);
        assert_abs_diff_eq!(s.achieved_correlation, 0.994101, epsilon = 1e-6);
    }

    #[test]
    fn single_column() {
        let x = Matrix::from_columns(&[vec![0.0, 0.3, 1.0]]).unwrap();
        let s = sketch_columns(&x, &ColSketchConfig::default()).unwrap();
        assert_eq!(s.selected, vec![0]);
        assert_abs_diff_eq!(s.achieved_correlation, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn errors() {
        let constant = Matrix::from_rows(&[[1.0, 2.0], [1.0, 2.0]]).unwrap();
        assert!(matches!(
            sketch_columns(&constant, &ColSketchConfig::default()),
            Err(SketchError::Degenerate { .. })
        ));
        let one_row = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(matches!(
            sketch_columns(&one_row, &ColSketchConfig::default()),
            Err(SketchError::Usage(_))
        ));
        assert!(sketch_columns(&coplanar(), &ColSketchConfig::with_threshold(0.0)).is_err());
        assert!(sketch_columns(&coplanar(), &ColSketchConfig::with_threshold(1.5)).is_err());
    }

    #[test]
    fn stall_stops_on_constant_remainder() {
        let x = Matrix::from_columns(&[vec![0.0, 1.0, 0.5], vec![3.0; 3], vec![1.0; 3]]).unwrap();
        let s = sketch_columns(&x, &ColSketchConfig::with_threshold(1.0)).unwrap();
        assert_eq!(s.selected, vec![0]);
    }

    #[test]
    fn project_coplanar() {
        let second = ColSketch {
            selected: vec![1],
            achieved_correlation: 1.0,
            trace: vec![],
        };
        let proj = project_columns(&coplanar(), &second).unwrap();
        assert_eq!(proj.column(0), vec![1.0, 4.0, 6.0]);
        let all = ColSketch {
            selected: vec![0, 1, 2],
            achieved_correlation: 1.0,
            trace: vec![],
        };
        assert_eq!(project_columns(&coplanar(), &all).unwrap(), coplanar());
        let stale = ColSketch {
            selected: vec![5],
            achieved_correlation: 1.0,
            trace: vec![],
        };
        assert!(project_columns(&coplanar(), &stale).is_err());
    }

    #[test]
    fn projected_distances_are_column_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v: Vec<f64> = (0..24).map(|_| rng.random::<f64>()).collect();
        let x = Matrix::new(6, 4, v).unwrap();
        let s = sketch_columns(
            &x,
            &ColSketchConfig {
                max_correlation: 1.0,
                max_columns: Some(2),
                engine: ColumnEngine::Cached,
            },
        )
        .unwrap();
        assert_eq!(s.k(), 2);
        let proj = project_columns(&x, &s).unwrap();
        let mut acc = CondensedDistances::zeros(6);
        for &j in &s.selected {
            acc.add_assign(&condensed_sq_dist_column(&x.column(j)).unwrap())
                .unwrap();
        }
        assert_eq!(condensed_sq_dist(&proj).unwrap(), acc);
    }

    fn unit_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Matrix> {
        (3usize..=max_rows, 1usize..=max_cols).prop_flat_map(|(n, p)| {
            prop::collection::vec(-5.0f64..5.0, n * p).prop_map(move |v| {
                normalize_columns(&Matrix::new(n, p, v).unwrap()).unwrap().0
            })
        })
    }

    proptest! {
        #[test]
        fn greedy_step_is_argmax(x in unit_matrix(8, 6), thr in 0.5f64..=1.0) {
            prop_assume!(condensed_sq_dist(&x).unwrap().norm() > 0.0);
            let s = sketch_columns(&x, &ColSketchConfig::with_threshold(thr)).unwrap();
            for (step, t) in s.trace.iter().enumerate() {
                let scan = scan_step(&x, &s.selected[..step]);
                let best = scan.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!((scan[t.column].unwrap() - best).abs() <= 1e-12);
            }
        }

        #[test]
        fn trace_is_monotone_and_consistent(x in unit_matrix(10, 8), thr in 0.5f64..=1.0, cache in any::<bool>()) {
            prop_assume!(condensed_sq_dist(&x).unwrap().norm() > 0.0);
            let engine = if cache { ColumnEngine::Cached } else { ColumnEngine::Recompute };
            let cfg = ColSketchConfig { max_correlation: thr, max_columns: None, engine };
            let s = sketch_columns(&x, &cfg).unwrap();
            prop_assert!(!s.selected.is_empty());
            for w in s.trace.windows(2) {
                prop_assert!(w[1].correlation >= w[0].correlation);
            }
            prop_assert_eq!(s.achieved_correlation, s.trace.last().unwrap().correlation);
            let mut sorted = s.selected.clone();
            sorted.sort_unstable();
            sorted.dedup();
            prop_assert_eq!(sorted.len(), s.selected.len());
            // cached and recomputed paths agree bit for bit
            let engine = if cache { ColumnEngine::Recompute } else { ColumnEngine::Cached };
            let other = sketch_columns(&x, &ColSketchConfig { engine, ..cfg }).unwrap();
            prop_assert_eq!(other, s);
        }

        #[test]
        fn moment_gram_matches_pairwise_products(x in unit_matrix(12, 6)) {
            let g = distance_gram(&x);
            for a in 0..x.n_cols() {
                let da = condensed_sq_dist_column(&x.column(a)).unwrap();
                for b in 0..x.n_cols() {
                    let db = condensed_sq_dist_column(&x.column(b)).unwrap();
                    let direct = da.dot(&db);
                    prop_assert!((g[a][b] - direct).abs() <= 1e-10 * (1.0 + direct));
                }
            }
        }

        #[test]
        fn moment_engine_follows_pairwise_path(x in unit_matrix(12, 8), thr in 0.5f64..=1.0) {
            prop_assume!(condensed_sq_dist(&x).unwrap().norm() > 0.0);
            let cfg = ColSketchConfig { max_correlation: thr, max_columns: None, engine: ColumnEngine::Cached };
            let pairwise = sketch_columns(&x, &cfg).unwrap();
            let moments = sketch_columns(&x, &ColSketchConfig { engine: ColumnEngine::Moments, ..cfg }).unwrap();
            prop_assert_eq!(&moments.selected, &pairwise.selected);
            for (a, b) in moments.trace.iter().zip(&pairwise.trace) {
                prop_assert!((a.correlation - b.correlation).abs() <= 1e-9);
            }
        }

        #[test]
        fn all_columns_recover_full_distances(x in unit_matrix(10, 8)) {
            let all: Vec<usize> = (0..x.n_cols()).collect();
            let sub = x.select_columns(&all).unwrap();
            prop_assert_eq!(condensed_sq_dist(&sub).unwrap(), condensed_sq_dist(&x).unwrap());
            if condensed_sq_dist(&x).unwrap().norm() > 0.0 {
                prop_assert!((subset_correlation(&x, &all).unwrap() - 1.0).abs() <= 1e-12);
            }
        }
    }
}
