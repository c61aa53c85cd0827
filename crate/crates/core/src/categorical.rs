//! Numeric scores for categorical variables.
//!
//! Each variable is dummy coded and the covariance of its indicator columns is
//! eigendecomposed on its own, never pooled with other variables. Row scores
//! are the centered indicators projected on the eigenvectors with non-null
//! eigenvalues. Scores are unscaled eigenvector projections; the pipeline's
//! column normalization absorbs their scale.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SketchError};
use crate::matrix::Matrix;

/// Eigenvalues at or below this are treated as null components.
pub const EIGEN_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalColumn {
    pub name: String,
    pub values: Vec<String>,
    /// Distinct labels in sorted order.
    pub levels: Vec<String>,
}

impl CategoricalColumn {
    pub fn new(name: impl Into<String>, values: Vec<String>) -> Self {
        let mut levels = values.clone();
        levels.sort();
        levels.dedup();
        Self {
            name: name.into(),
            values,
            levels,
        }
    }

    fn level_codes(&self, levels: &[String]) -> Result<Vec<usize>> {
        self.values
            .iter()
            .map(|v| {
                levels.binary_search(v).map_err(|_| {
                    SketchError::usage(format!(
                        "level {v:?} of column {:?} was not seen when the encoding was fitted",
                        self.name
                    ))
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CAEncoding {
    pub levels: Vec<String>,
    /// Indicator column means used for centering.
    pub means: Vec<f64>,
    /// Row `l` holds the loadings of level `l` on each retained component.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Retained eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    pub retained: usize,
}

/// `n x L` indicator matrix, one column per level.
pub fn dummy_code(col: &CategoricalColumn) -> Result<Matrix> {
    if col.values.is_empty() || col.levels.is_empty() {
        return Err(SketchError::usage(format!(
            "categorical column {:?} is empty",
            col.name
        )));
    }
    let codes = col.level_codes(&col.levels)?;
    let l = col.levels.len();
    let mut values = vec![0.0; codes.len() * l];
    for (i, &c) in codes.iter().enumerate() {
        values[i * l + c] = 1.0;
    }
    Matrix::new(codes.len(), l, values)
}

/// Eigendecomposition of the (population) covariance of an indicator matrix.
pub fn fit_ca(indicators: &Matrix, levels: &[String]) -> Result<CAEncoding> {
    let (n, l) = (indicators.n_rows(), indicators.n_cols());
    if n == 0 || l == 0 || levels.len() != l {
        return Err(SketchError::usage(
            "indicator matrix must be non-empty with one column per level",
        ));
    }
    let means: Vec<f64> = (0..l)
        .map(|j| indicators.column(j).iter().sum::<f64>() / n as f64)
        .collect();
    let mut cov = DMatrix::<f64>::zeros(l, l);
    for row in indicators.rows() {
        for a in 0..l {
            let da = row[a] - means[a];
            for b in 0..l {
                cov[(a, b)] += da * (row[b] - means[b]);
            }
        }
    }
    cov /= n as f64;

    let eigen = cov
        .clone()
        .try_symmetric_eigen(1e-14, 10_000)
        .ok_or_else(|| SketchError::Numeric {
            module: "categorical_encoder",
            message: format!("symmetric eigensolver did not converge on a {l}x{l} covariance"),
        })?;

    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&k| eigen.eigenvalues[k] > EIGEN_CUTOFF)
        .collect();

    let mut eigenvectors = vec![vec![0.0; kept.len()]; l];
    let mut eigenvalues = Vec::with_capacity(kept.len());
    for (c, &k) in kept.iter().enumerate() {
        let v = eigen.eigenvectors.column(k);
        // sign convention: largest-magnitude loading is positive
        let pivot = (0..l)
            .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()))
            .unwrap_or(0);
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for level in 0..l {
            eigenvectors[level][c] = sign * v[level];
        }
        eigenvalues.push(eigen.eigenvalues[k].max(0.0));
    }

    Ok(CAEncoding {
        levels: levels.to_vec(),
        means,
        retained: kept.len(),
        eigenvectors,
        eigenvalues,
    })
}

/// Row scores of a column under a fitted encoding (`n x retained`).
pub fn ca_scores(col: &CategoricalColumn, enc: &CAEncoding) -> Result<Matrix> {
    let codes = col.level_codes(&enc.levels)?;
    let r = enc.retained;
    let l = enc.levels.len();
    // the centered indicator row for level c is e_c - means
    let base: Vec<f64> = (0..r)
        .map(|k| -(0..l).map(|a| enc.means[a] * enc.eigenvectors[a][k]).sum::<f64>())
        .collect();
    let mut values = Vec::with_capacity(codes.len() * r);
    for c in codes {
        values.extend((0..r).map(|k| enc.eigenvectors[c][k] + base[k]));
    }
    Matrix::new(col.values.len(), r, values)
}

/// Dummy codes, fits and scores one column in a single call.
pub fn encode(col: &CategoricalColumn) -> Result<(CAEncoding, Matrix)> {
    let enc = fit_ca(&dummy_code(col)?, &col.levels)?;
    let scores = ca_scores(col, &enc)?;
    Ok((enc, scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn col(values: &[&str]) -> CategoricalColumn {
        CategoricalColumn::new("c", values.iter().map(|s| s.to_string()).collect())
    }

    fn covariance(x: &Matrix) -> Vec<Vec<f64>> {
        let (n, l) = (x.n_rows(), x.n_cols());
        let means: Vec<f64> = (0..l).map(|j| x.column(j).iter().sum::<f64>() / n as f64).collect();
        let mut c = vec![vec![0.0; l]; l];
        for a in 0..l {
            for b in 0..l {
                c[a][b] = (0..n)
                    .map(|i| (x.get(i, a) - means[a]) * (x.get(i, b) - means[b]))
                    .sum::<f64>()
                    / n as f64;
            }
        }
        c
    }

    #[test]
    fn dummy_code_examples() {
        let d = dummy_code(&col(&["a", "b", "a"])).unwrap();
        assert_eq!(d.values(), &[1.0, 0.0, 0.0, 1.0, 1.0, 0.0]);
        let d = dummy_code(&col(&["z", "z"])).unwrap();
        assert_eq!(d.values(), &[1.0, 1.0]);
        let d = dummy_code(&col(&["a", "b", "c", "c", "b", "a"])).unwrap();
        let sums: Vec<f64> = (0..3).map(|j| d.column(j).iter().sum()).collect();
        assert_eq!(sums, vec![2.0, 2.0, 2.0]);
        for row in d.rows() {
            assert_eq!(row.iter().sum::<f64>(), 1.0);
        }
        assert!(dummy_code(&col(&[])).is_err());
    }

    #[test]
    fn single_level_has_no_components() {
        let (enc, scores) = encode(&col(&["x", "x", "x"])).unwrap();
        assert_eq!(enc.retained, 0);
        assert_eq!(scores.n_cols(), 0);
    }

    #[test]
    fn two_balanced_levels_closed_form() {
        // covariance [[1/4,-1/4],[-1/4,1/4]] has eigenvalue 1/2 on (1,-1)/sqrt 2;
        // centered codes are +-1/2, so scores are +-1/sqrt 2.
        let c = col(&["a", "b", "a", "b", "b", "a"]);
        let (enc, scores) = encode(&c).unwrap();
        assert_eq!(enc.retained, 1);
        assert_abs_diff_eq!(enc.eigenvalues[0], 0.5, epsilon = 1e-12);
        let s = scores.column(0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a_score = s[0];
        assert_abs_diff_eq!(a_score.abs(), h, epsilon = 1e-12);
        for (v, label) in s.iter().zip(&c.values) {
            let expected = if label == "a" { a_score } else { -a_score };
            assert_abs_diff_eq!(*v, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn four_levels_reconstruct_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let labels = ["p", "q", "r", "s"];
        let values: Vec<String> = (0..20)
            .map(|_| labels[rng.random_range(0..4)].to_string())
            .collect();
        let c = CategoricalColumn::new("v", values);
        let d = dummy_code(&c).unwrap();
        let enc = fit_ca(&d, &c.levels).unwrap();
        let cov = covariance(&d);
        let l = c.levels.len();
        for a in 0..l {
            for b in 0..l {
                let rec: f64 = (0..enc.retained)
                    .map(|k| enc.eigenvectors[a][k] * enc.eigenvalues[k] * enc.eigenvectors[b][k])
                    .sum();
                assert_abs_diff_eq!(rec, cov[a][b], epsilon = 1e-8);
            }
        }
        for k in 0..enc.retained {
            for k2 in 0..enc.retained {
                let dot: f64 = (0..l).map(|a| enc.eigenvectors[a][k] * enc.eigenvectors[a][k2]).sum();
                assert_abs_diff_eq!(dot, if k == k2 { 1.0 } else { 0.0 }, epsilon = 1e-8);
            }
        }
        assert!(enc.eigenvalues.windows(2).all(|w| w[0] >= w[1]));

        let scores = ca_scores(&c, &enc).unwrap();
        for k in 0..enc.retained {
            let col = scores.column(k);
            assert_abs_diff_eq!(col.iter().sum::<f64>() / 20.0, 0.0, epsilon = 1e-10);
            for k2 in k + 1..enc.retained {
                let cross: f64 = col.iter().zip(scores.column(k2)).map(|(a, b)| a * b).sum();
                assert_abs_diff_eq!(cross / 20.0, 0.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn constant_column_scores_identical() {
        let c = col(&["a", "a", "b", "a"]);
        let (enc, _) = encode(&c).unwrap();
        let same = col(&["a", "a", "a"]);
        let s = ca_scores(&same, &enc).unwrap();
        assert!(s.rows().all(|r| r == s.row(0)));
    }

    #[test]
    fn unseen_level_is_rejected() {
        let (enc, _) = encode(&col(&["a", "b"])).unwrap();
        let err = ca_scores(&col(&["a", "zzz"]), &enc).unwrap_err();
        assert!(err.to_string().contains("zzz"));
    }

    #[test]
    fn row_permutation_equivariance() {
        let values = ["a", "c", "b", "a", "c", "c", "b"];
        let perm = [3, 0, 6, 1, 5, 2, 4];
        let c = col(&values);
        let permuted = col(&perm.map(|i| values[i]));
        let (_, s) = encode(&c).unwrap();
        let (_, sp) = encode(&permuted).unwrap();
        for (row, &i) in perm.iter().enumerate() {
            for k in 0..s.n_cols() {
                assert_abs_diff_eq!(sp.get(row, k), s.get(i, k), epsilon = 1e-10);
            }
        }
    }
}
