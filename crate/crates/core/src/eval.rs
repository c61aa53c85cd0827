//! Baselines and distance-preservation evidence.
//!
//! Random row samples and random column subsets are the reference points for
//! the sketches; [`exhaustive_best_columns`] gives the exact best subset on
//! small inputs so the greedy column path can be scored against it.

use std::time::Instant;

use itertools::Itertools;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cols::{sketch_columns, subset_correlation, ColSketchConfig};
use crate::error::{Result, SketchError};
use crate::matrix::{
    check_same_size, condensed_sq_dist, frobenius_correlation, CondensedDistances, Matrix,
};
use crate::bounds::empirical_max_sq_discrepancy;

/// Largest number of subsets [`exhaustive_best_columns`] will enumerate.
pub const EXHAUSTIVE_BUDGET: u128 = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    /// Rows or columns retained.
    pub size: usize,
    pub correlation: f64,
    pub max_discrepancy: f64,
    pub runtime_secs: f64,
    pub seed: Option<u64>,
}

fn sorted_sample(n: usize, m: usize, seed: u64, what: &str) -> Result<Vec<usize>> {
    if m > n {
        return Err(SketchError::usage(format!(
            "cannot sample {m} {what} out of {n}"
        )));
    }
    let mut idx = index::sample(&mut ChaCha8Rng::seed_from_u64(seed), n, m).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// Uniform sample of `m` row indices without replacement, ascending.
pub fn random_row_sample(n: usize, m: usize, seed: u64) -> Result<Vec<usize>> {
    sorted_sample(n, m, seed, "rows")
}

/// Uniform subset of `k` column indices, ascending.
pub fn random_column_subset(p: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    sorted_sample(p, k, seed, "columns")
}

/// `(original, reduced)` Euclidean distance per pair, plot-ready.
pub fn distance_pairs(
    full: &CondensedDistances,
    reduced: &CondensedDistances,
) -> Result<Vec<(f64, f64)>> {
    check_same_size(full, reduced)?;
    Ok(full
        .as_slice()
        .iter()
        .zip(reduced.as_slice())
        .map(|(a, b)| (a.sqrt(), b.sqrt()))
        .collect())
}

/// Writes distance pairs with the header `original,reduced`.
pub fn write_distance_pairs<W: std::io::Write>(pairs: &[(f64, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["original", "reduced"])?;
    for (a, b) in pairs {
        w.write_record([a.to_string(), b.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return acc;
        }
    }
    acc
}

/// The `k`-subset of columns whose distances correlate best with all columns.
pub fn exhaustive_best_columns(x: &Matrix, k: usize) -> Result<(Vec<usize>, f64)> {
    let p = x.n_cols();
    if k == 0 || k > p {
        return Err(SketchError::usage(format!("subset size {k} outside 1..={p}")));
    }
    let count = binomial(p, k);
    if count > EXHAUSTIVE_BUDGET {
        return Err(SketchError::usage(format!(
            "{count} subsets of size {k} exceed the budget of {EXHAUSTIVE_BUDGET}"
        )));
    }
    let full = condensed_sq_dist(x)?;
    let mut best: Option<(Vec<usize>, f64)> = None;
    for subset in (0..p).combinations(k) {
        let d = condensed_sq_dist(&x.select_columns(&subset)?)?;
        let c = frobenius_correlation(&d, &full)?;
        if best.as_ref().is_none_or(|(_, b)| c > *b) {
            best = Some((subset, c));
        }
    }
    Ok(best.expect("at least one subset"))
}

/// Scores a column subset of a normalized matrix.
pub fn score_columns(x: &Matrix, subset: &[usize], method: &str, seed: Option<u64>, started: Instant) -> Result<EvalReport> {
    let full = condensed_sq_dist(x)?;
    let reduced = condensed_sq_dist(&x.select_columns(subset)?)?;
    let (max_discrepancy, _) = empirical_max_sq_discrepancy(&full, &reduced)?;
    Ok(EvalReport {
        method: method.into(),
        size: subset.len(),
        correlation: subset_correlation(x, subset)?,
        max_discrepancy,
        runtime_secs: started.elapsed().as_secs_f64(),
        seed,
    })
}

/// Greedy column sketch against random column subsets of the same size.
pub fn compare_column_methods(
    x: &Matrix,
    cfg: &ColSketchConfig,
    seeds: &[u64],
) -> Result<Vec<EvalReport>> {
    let started = Instant::now();
    let sketch = sketch_columns(x, cfg)?;
    let mut out = vec![score_columns(x, &sketch.selected, "col_sketch", None, started)?];
    for &seed in seeds {
        let started = Instant::now();
        let subset = random_column_subset(x.n_cols(), sketch.k(), seed)?;
        out.push(score_columns(x, &subset, "random_columns", Some(seed), started)?);
    }
    Ok(out)
}

/// Per-column maxima of the rows at `indices`.
pub fn column_maxima(x: &Matrix, indices: &[usize]) -> Vec<f64> {
    (0..x.n_cols())
        .map(|j| {
            indices
                .iter()
                .map(|&i| x.get(i, j))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Per-column minima of the rows at `indices`.
pub fn column_minima(x: &Matrix, indices: &[usize]) -> Vec<f64> {
    (0..x.n_cols())
        .map(|j| {
            indices
                .iter()
                .map(|&i| x.get(i, j))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// How often a row sketch reaches further into each column's tails than a
/// random sample of the same size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingContrast {
    pub m: usize,
    pub seeds: Vec<u64>,
    /// Seed x column comparisons.
    pub cases: usize,
    /// Cases where the sketch maximum is at least the sample maximum.
    pub max_wins: usize,
    /// Cases where the sketch minimum is at most the sample minimum.
    pub min_wins: usize,
}

impl SamplingContrast {
    pub fn max_fraction(&self) -> f64 {
        self.max_wins as f64 / self.cases as f64
    }

    pub fn min_fraction(&self) -> f64 {
        self.min_wins as f64 / self.cases as f64
    }
}

/// Compares column extremes of the rows `exemplars` with those of seeded
/// uniform samples of equal size.
pub fn sampling_contrast(x: &Matrix, exemplars: &[usize], seeds: &[u64]) -> Result<SamplingContrast> {
    if exemplars.is_empty() || seeds.is_empty() {
        return Err(SketchError::usage("sampling contrast needs exemplars and seeds"));
    }
    let m = exemplars.len();
    let (smax, smin) = (column_maxima(x, exemplars), column_minima(x, exemplars));
    let (mut max_wins, mut min_wins) = (0, 0);
    for &seed in seeds {
        let sample = random_row_sample(x.n_rows(), m, seed)?;
        let (rmax, rmin) = (column_maxima(x, &sample), column_minima(x, &sample));
        max_wins += smax.iter().zip(&rmax).filter(|(s, r)| s >= r).count();
        min_wins += smin.iter().zip(&rmin).filter(|(s, r)| s <= r).count();
    }
    Ok(SamplingContrast {
        m,
        seeds: seeds.to_vec(),
        cases: seeds.len() * x.n_cols(),
        max_wins,
        min_wins,
    })
}

/// `n x p` matrix of independent standard normal draws.
pub fn spherical_gaussians(n: usize, p: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n * p).map(|_| StandardNormal.sample(&mut rng)).collect();
    Matrix::new(n, p, values).expect("finite draws")
}

/// Standard normal columns, except columns 2 and 3 (0-based) which mix two
/// and three well separated unit Gaussians.
pub fn clustered_gaussians(n: usize, p: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("valid sd");
    let mut values = Vec::with_capacity(n * p);
    for i in 0..n {
        for j in 0..p {
            let z: f64 = unit.sample(&mut rng);
            let centre = match j {
                2 => 8.0 * (i % 2) as f64,
                3 => 8.0 * (i % 3) as f64,
                _ => 0.0,
            };
            values.push(centre + z);
        }
    }
    Matrix::new(n, p, values).expect("finite draws")
}
