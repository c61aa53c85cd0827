//! Dense matrices, column normalization and condensed squared-distance arrays.
//!
//! Every distance array in this crate is *condensed*: the `m(m-1)/2` entries
//! above the diagonal of the pairwise squared-distance matrix, stored i-major
//! as `(0,1), (0,2), .., (0,m-1), (1,2), ..`. Squared distances of a matrix
//! are the sum of the per-column arrays, and all accumulation loops run in
//! ascending column order so both routes produce bit-identical results.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SketchError};

/// Dense row-major matrix; rows are points and columns are dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
    row_labels: Option<Vec<String>>,
    col_labels: Option<Vec<String>>,
}

impl Matrix {
    /// Builds a matrix from row-major values. All values must be finite.
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_rows * n_cols {
            return Err(SketchError::usage(format!(
                "matrix of {n_rows}x{n_cols} needs {} values, got {}",
                n_rows * n_cols,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(SketchError::NonFinite {
                row: pos / n_cols.max(1),
                column: (pos % n_cols.max(1)).to_string(),
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            values,
            row_labels: None,
            col_labels: None,
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * n_cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(SketchError::usage(format!(
                    "row {i} has {} values, expected {n_cols}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), n_cols, values)
    }

    pub fn from_columns<C: AsRef<[f64]>>(cols: &[C]) -> Result<Self> {
        let n_rows = cols.first().map_or(0, |c| c.as_ref().len());
        let n_cols = cols.len();
        let mut values = vec![0.0; n_rows * n_cols];
        for (j, col) in cols.iter().enumerate() {
            let col = col.as_ref();
            if col.len() != n_rows {
                return Err(SketchError::usage(format!(
                    "column {j} has {} values, expected {n_rows}",
                    col.len()
                )));
            }
            for (i, &v) in col.iter().enumerate() {
                values[i * n_cols + j] = v;
            }
        }
        Self::new(n_rows, n_cols, values)
    }

    pub fn with_row_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_rows {
            return Err(SketchError::usage("row label count differs from row count"));
        }
        self.row_labels = Some(labels);
        Ok(self)
    }

    pub fn with_col_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_cols {
            return Err(SketchError::usage(
                "column label count differs from column count",
            ));
        }
        self.col_labels = Some(labels);
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row_labels(&self) -> Option<&[String]> {
        self.row_labels.as_deref()
    }

    pub fn col_labels(&self) -> Option<&[String]> {
        self.col_labels.as_deref()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on a zero chunk size
        self.values.chunks_exact(self.n_cols.max(1)).take(self.n_rows)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.get(i, j)).collect()
    }

    /// Submatrix made of the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Matrix> {
        let mut values = Vec::with_capacity(indices.len() * self.n_cols);
        for &i in indices {
            if i >= self.n_rows {
                return Err(SketchError::usage(format!(
                    "row index {i} out of range for {} rows",
                    self.n_rows
                )));
            }
            values.extend_from_slice(self.row(i));
        }
        let mut out = Matrix::new(indices.len(), self.n_cols, values)?;
        out.col_labels = self.col_labels.clone();
        out.row_labels = self
            .row_labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i].clone()).collect());
        Ok(out)
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Matrix> {
        if let Some(&j) = indices.iter().find(|&&j| j >= self.n_cols) {
            return Err(SketchError::usage(format!(
                "column index {j} out of range for {} columns",
                self.n_cols
            )));
        }
        let mut values = Vec::with_capacity(indices.len() * self.n_rows);
        for row in self.rows() {
            values.extend(indices.iter().map(|&j| row[j]));
        }
        let mut out = Matrix::new(self.n_rows, indices.len(), values)?;
        out.row_labels = self.row_labels.clone();
        out.col_labels = self
            .col_labels
            .as_ref()
            .map(|l| indices.iter().map(|&j| l[j].clone()).collect());
        Ok(out)
    }
}

/// Per-column `(min, max)` of the affine map used by [`normalize_columns`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub ranges: Vec<(f64, f64)>,
}

impl NormalizationParams {
    /// Identity map for `p` columns, used when normalization is switched off.
    pub fn identity(p: usize) -> Self {
        Self {
            ranges: vec![(0.0, 1.0); p],
        }
    }

    #[inline]
    pub fn forward(&self, j: usize, x: f64) -> f64 {
        let (lo, hi) = self.ranges[j];
        (x - lo) / (hi - lo)
    }

    #[inline]
    pub fn inverse(&self, j: usize, y: f64) -> f64 {
        let (lo, hi) = self.ranges[j];
        lo + y * (hi - lo)
    }

    /// Maps a normalized matrix back to original units.
    pub fn denormalize(&self, m: &Matrix) -> Result<Matrix> {
        if m.n_cols() != self.ranges.len() {
            return Err(SketchError::usage(
                "normalization parameters do not match column count",
            ));
        }
        let p = m.n_cols();
        let values = m
            .values()
            .iter()
            .enumerate()
            .map(|(k, &v)| self.inverse(k % p, v))
            .collect();
        Matrix::new(m.n_rows(), p, values)
    }
}

/// Min-max normalizes every column to `[0, 1]`.
///
/// A constant column maps to zeros and records `(min, min + 1)` so the inverse
/// map stays well defined.
pub fn normalize_columns(m: &Matrix) -> Result<(Matrix, NormalizationParams)> {
    if m.n_rows() == 0 || m.n_cols() == 0 {
        return Err(SketchError::usage(
            "normalize_columns needs at least one row and one column",
        ));
    }
    let p = m.n_cols();
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); p];
    for row in m.rows() {
        for (r, &v) in ranges.iter_mut().zip(row) {
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
        }
    }
    for r in &mut ranges {
        if r.1 <= r.0 {
            r.1 = r.0 + 1.0;
        }
    }
    let params = NormalizationParams { ranges };
    let values = m
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| params.forward(k % p, v))
        .collect();
    let mut out = Matrix::new(m.n_rows(), p, values)?;
    out.row_labels = m.row_labels.clone();
    out.col_labels = m.col_labels.clone();
    Ok((out, params))
}

/// Euclidean distance between two equal-length vectors.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(SketchError::usage(format!(
            "vectors of length {} and {} have no distance",
            a.len(),
            b.len()
        )));
    }
    Ok(squared_distance(a, b).sqrt())
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Number of unordered pairs among `m` points.
#[inline]
pub fn pair_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// Offset of pair `(i, j)`, `i < j < m`, in a condensed array.
#[inline]
pub fn condensed_index(m: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < m);
    i * (2 * m - i - 1) / 2 + (j - i - 1)
}

/// Inverse of [`condensed_index`].
pub fn condensed_pair(m: usize, offset: usize) -> (usize, usize) {
    debug_assert!(offset < pair_count(m));
    let mut i = 0;
    let mut start = 0;
    loop {
        let len = m - i - 1;
        if offset < start + len {
            return (i, i + 1 + offset - start);
        }
        start += len;
        i += 1;
    }
}

/// Condensed pairwise squared distances among `m` points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondensedDistances {
    m: usize,
    d2: Vec<f64>,
}

impl CondensedDistances {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            d2: vec![0.0; pair_count(m)],
        }
    }

    pub fn from_vec(m: usize, d2: Vec<f64>) -> Result<Self> {
        if d2.len() != pair_count(m) {
            return Err(SketchError::usage(format!(
                "condensed array for {m} points needs {} entries, got {}",
                pair_count(m),
                d2.len()
            )));
        }
        Ok(Self { m, d2 })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.d2
    }

    pub fn len(&self) -> usize {
        self.d2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d2.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.d2[condensed_index(self.m, i, j)]
    }

    pub fn norm(&self) -> f64 {
        self.d2.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &CondensedDistances) -> f64 {
        self.d2.iter().zip(&other.d2).map(|(a, b)| a * b).sum()
    }

    /// In-place `self += other`.
    pub fn add_assign(&mut self, other: &CondensedDistances) -> Result<()> {
        check_same_size(self, other)?;
        for (a, b) in self.d2.iter_mut().zip(&other.d2) {
            *a += b;
        }
        Ok(())
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        let m = self.m;
        (0..m)
            .flat_map(move |i| (i + 1..m).map(move |j| (i, j)))
            .zip(self.d2.iter().copied())
    }
}

pub(crate) fn check_same_size(a: &CondensedDistances, b: &CondensedDistances) -> Result<()> {
    if a.m != b.m {
        return Err(SketchError::usage(format!(
            "condensed arrays over {} and {} points cannot be combined",
            a.m, b.m
        )));
    }
    Ok(())
}

/// Squared Euclidean distances between all rows of `m`.
pub fn condensed_sq_dist(m: &Matrix) -> Result<CondensedDistances> {
    if m.n_rows() < 2 {
        return Err(SketchError::usage(
            "distance array needs at least two rows",
        ));
    }
    let n = m.n_rows();
    let mut d2 = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        let a = m.row(i);
        for j in i + 1..n {
            d2.push(squared_distance(a, m.row(j)));
        }
    }
    Ok(CondensedDistances { m: n, d2 })
}

/// Squared distances contributed by a single column.
pub fn condensed_sq_dist_column(col: &[f64]) -> Result<CondensedDistances> {
    let n = col.len();
    if n < 2 {
        return Err(SketchError::usage(
            "distance array needs at least two values",
        ));
    }
    let mut d2 = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in i + 1..n {
            let d = col[i] - col[j];
            d2.push(d * d);
        }
    }
    Ok(CondensedDistances { m: n, d2 })
}

/// Elementwise sum of two condensed arrays over the same points.
pub fn accumulate(a: &CondensedDistances, b: &CondensedDistances) -> Result<CondensedDistances> {
    let mut out = a.clone();
    out.add_assign(b)?;
    Ok(out)
}

/// Cosine between two condensed arrays; 0 when either has zero norm.
pub fn frobenius_correlation(a: &CondensedDistances, b: &CondensedDistances) -> Result<f64> {
    check_same_size(a, b)?;
    Ok(cosine(a.as_slice(), b.as_slice(), b.norm()))
}

#[inline]
pub(crate) fn cosine(a: &[f64], b: &[f64], b_norm: f64) -> f64 {
    let mut dot = 0.0;
    let mut aa = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        aa += x * x;
    }
    let denom = aa.sqrt() * b_norm;
    if denom == 0.0 {
        0.0
    } else {
        // rounding can overshoot 1 for proportional arrays
        (dot / denom).min(1.0)
    }
}
