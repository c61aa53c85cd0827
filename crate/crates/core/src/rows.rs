//! Single-pass Leader covering of the rows with fixed-radius Euclidean balls.
//!
//! Each visited row joins the first exemplar, in creation order, that lies
//! strictly closer than the radius; otherwise the row becomes a new exemplar.
//! Exemplars are original rows, so distances among them are exact.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SketchError};
use crate::matrix::{squared_distance, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Radius {
    /// `0.25 / (ln n)^(1/p)`.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisitOrder {
    Sequential,
    ShuffledWithSeed(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowSketchConfig {
    pub radius: Radius,
    pub visit_order: VisitOrder,
}

impl Default for RowSketchConfig {
    fn default() -> Self {
        Self {
            radius: Radius::Auto,
            visit_order: VisitOrder::Sequential,
        }
    }
}

impl RowSketchConfig {
    pub fn with_radius(radius: f64) -> Self {
        Self {
            radius: Radius::Fixed(radius),
            ..Self::default()
        }
    }

    /// Resolves the radius for an `n x p` input, validating explicit values.
    pub fn resolve_radius(&self, n: usize, p: usize) -> Result<f64> {
        match self.radius {
            Radius::Auto => default_radius(n, p),
            Radius::Fixed(r) => {
                let max = (p as f64).sqrt();
                if !(r > 0.0 && r <= max) {
                    return Err(SketchError::usage(format!(
                        "radius {r} outside (0, {max}] for {p} columns"
                    )));
                }
                Ok(r)
            }
        }
    }
}

/// Exemplars and their ball memberships.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSketch {
    /// Original row index of each exemplar, in creation order.
    pub exemplar_indices: Vec<usize>,
    /// Member row indices per exemplar, in visit order; includes the exemplar.
    pub members: Vec<Vec<usize>>,
    pub radius_used: f64,
    pub weights: Vec<usize>,
}

impl RowSketch {
    /// Exemplar count.
    pub fn m(&self) -> usize {
        self.exemplar_indices.len()
    }

    pub fn n(&self) -> usize {
        self.weights.iter().sum()
    }

    /// Exemplar slot of every original row.
    pub fn assignment(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.n()];
        for (slot, members) in self.members.iter().enumerate() {
            for &i in members {
                out[i] = slot;
            }
        }
        out
    }
}

/// Default covering radius `0.25 / (ln n)^(1/p)` in normalized units.
pub fn default_radius(n: usize, p: usize) -> Result<f64> {
    if n < 2 || p < 1 {
        return Err(SketchError::usage(format!(
            "default radius needs n >= 2 and p >= 1, got n={n}, p={p}"
        )));
    }
    Ok(0.25 / (n as f64).ln().powf(1.0 / p as f64))
}

fn visit_sequence(n: usize, order: VisitOrder) -> Vec<usize> {
    let mut seq: Vec<usize> = (0..n).collect();
    if let VisitOrder::ShuffledWithSeed(seed) = order {
        seq.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    seq
}

/// Covers the rows of a normalized matrix with balls of one radius.
pub fn sketch_rows(x: &Matrix, cfg: &RowSketchConfig) -> Result<RowSketch> {
    let (n, p) = (x.n_rows(), x.n_cols());
    if n == 0 || p == 0 {
        return Err(SketchError::usage("sketch_rows needs a non-empty matrix"));
    }
    let radius = match cfg.radius {
        // the formula is undefined for a single row; one row is its own exemplar anyway
        Radius::Auto if n == 1 => 0.25,
        _ => cfg.resolve_radius(n, p)?,
    };
    Ok(leader(x, radius, cfg.visit_order))
}

pub(crate) fn leader(x: &Matrix, radius: f64, order: VisitOrder) -> RowSketch {
    let p = x.n_cols();
    let mut exemplar_indices = Vec::new();
    let mut exemplar_rows: Vec<f64> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();

    for i in visit_sequence(x.n_rows(), order) {
        let row = x.row(i);
        match first_within(&exemplar_rows, p, row, radius) {
            Some(slot) => members[slot].push(i),
            None => {
                exemplar_indices.push(i);
                exemplar_rows.extend_from_slice(row);
                members.push(vec![i]);
            }
        }
    }
    let weights = members.iter().map(Vec::len).collect();
    RowSketch {
        exemplar_indices,
        members,
        radius_used: radius,
        weights,
    }
}

#[inline]
fn first_within(exemplar_rows: &[f64], p: usize, row: &[f64], radius: f64) -> Option<usize> {
    exemplar_rows
        .chunks_exact(p)
        .position(|e| distance(row, e) < radius)
}

#[inline]
fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

/// Recovers ball membership from an exemplar list.
///
/// A row belongs to the first exemplar in creation order within the radius;
/// this reproduces the single-pass assignment exactly, whatever the visit
/// order was.
pub fn assign_to_exemplars(
    x: &Matrix,
    exemplar_indices: &[usize],
    radius: f64,
) -> Result<RowSketch> {
    if let Some(&i) = exemplar_indices.iter().find(|&&i| i >= x.n_rows()) {
        return Err(SketchError::usage(format!(
            "exemplar index {i} out of range for {} rows",
            x.n_rows()
        )));
    }
    let exemplar_rows = x.select_rows(exemplar_indices)?;
    let p = x.n_cols();
    let mut members = vec![Vec::new(); exemplar_indices.len()];
    for i in 0..x.n_rows() {
        let slot = first_within(exemplar_rows.values(), p, x.row(i), radius).ok_or_else(|| {
            SketchError::usage(format!("row {i} is not covered by any exemplar"))
        })?;
        members[slot].push(i);
    }
    for (slot, &e) in exemplar_indices.iter().enumerate() {
        if !members[slot].contains(&e) {
            return Err(SketchError::usage(format!(
                "exemplar {e} is claimed by an earlier exemplar; list is not a Leader covering"
            )));
        }
    }
    let weights = members.iter().map(Vec::len).collect();
    Ok(RowSketch {
        exemplar_indices: exemplar_indices.to_vec(),
        members,
        radius_used: radius,
        weights,
    })
}

/// The `m x p` matrix of exemplar rows, verbatim.
pub fn exemplar_matrix(s: &RowSketch, x: &Matrix) -> Result<Matrix> {
    x.select_rows(&s.exemplar_indices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{euclidean_distance, normalize_columns};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    // Literal transcription of the pseudocode loop, kept independent of `leader`.
    fn reference_leader(rows: &[Vec<f64>], r: f64) -> (Vec<usize>, Vec<Vec<usize>>) {
        let mut exemplars: Vec<usize> = vec![];
        let mut members: Vec<Vec<usize>> = vec![];
        for i in 0..rows.len() {
            let mut new_exemplar = true;
            for j in 0..exemplars.len() {
                let e = &rows[exemplars[j]];
                let d = rows[i]
                    .iter()
                    .zip(e)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if d < r {
                    members[j].push(i);
                    new_exemplar = false;
                    break;
                }
            }
            if new_exemplar {
                exemplars.push(i);
                members.push(vec![i]);
            }
        }
        (exemplars, members)
    }

    #[test]
    fn default_radius_values() {
        assert_abs_diff_eq!(default_radius(1000, 2).unwrap(), 0.095_119_93, epsilon = 1e-8);
        assert_abs_diff_eq!(default_radius(3, 1).unwrap(), 0.227_559_81, epsilon = 1e-8);
        assert_abs_diff_eq!(
            default_radius(1_000_000, 3).unwrap(),
            0.104_188_0,
            epsilon = 1e-7
        );
        assert!(default_radius(1, 3).is_err());
        assert!(default_radius(5, 0).is_err());
    }

    #[test]
    fn identical_rows_single_exemplar() {
        let x = Matrix::from_rows(&vec![vec![0.3, 0.7]; 25]).unwrap();
        let s = sketch_rows(&x, &RowSketchConfig::with_radius(0.1)).unwrap();
        assert_eq!(s.exemplar_indices, vec![0]);
        assert_eq!(s.weights, vec![25]);
    }

    #[test]
    fn far_rows_split() {
        let x = Matrix::from_rows(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        let s = sketch_rows(&x, &RowSketchConfig::with_radius(0.5)).unwrap();
        assert_eq!(s.weights, vec![1, 1]);
    }

    #[test]
    fn boundary_distance_creates_exemplar() {
        let x = Matrix::from_rows(&[[0.0], [0.5]]).unwrap();
        let s = sketch_rows(&x, &RowSketchConfig::with_radius(0.5)).unwrap();
        assert_eq!(s.m(), 2);
    }

    #[test]
    fn grid_matches_reference() {
        let rows: Vec<Vec<f64>> = (0..200).map(|i| vec![i as f64 / 199.0]).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let s = sketch_rows(&x, &RowSketchConfig::with_radius(0.30)).unwrap();
        let (ex, mem) = reference_leader(&rows, 0.30);
        assert_eq!(s.exemplar_indices, ex);
        assert_eq!(s.members, mem);
    }

    #[test]
    fn exemplar_matrix_cases() {
        let x = Matrix::from_rows(&[[0.1, 0.2], [0.1, 0.2]]).unwrap();
        let s = sketch_rows(&x, &RowSketchConfig::with_radius(0.5)).unwrap();
        assert_eq!(exemplar_matrix(&s, &x).unwrap(), x.select_rows(&[0]).unwrap());

        let x = Matrix::from_rows(&[[0.0, 0.0], [0.5, 0.1], [1.0, 1.0]]).unwrap();
        let s = sketch_rows(&x, &RowSketchConfig::with_radius(1e-9)).unwrap();
        assert_eq!(exemplar_matrix(&s, &x).unwrap(), x);

        let stale = RowSketch {
            exemplar_indices: vec![7],
            members: vec![vec![7]],
            radius_used: 0.1,
            weights: vec![1],
        };
        assert!(exemplar_matrix(&stale, &x).is_err());
    }

    #[test]
    fn gaussian_exemplars_are_verbatim_rows() {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..1500).map(|_| StandardNormal.sample(&mut rng)).collect();
        let raw = Matrix::new(500, 3, values).unwrap();
        let (x, _) = normalize_columns(&raw).unwrap();
        let s = sketch_rows(&x, &RowSketchConfig::default()).unwrap();
        let e = exemplar_matrix(&s, &x).unwrap();
        // lookup by value, not by index, to check the rows are bit-identical
        for row in e.rows() {
            assert!(x.rows().any(|r| r == row));
        }
    }

    #[test]
    fn invalid_config() {
        let x = Matrix::from_rows(&[[0.0, 0.0]]).unwrap();
        assert!(sketch_rows(&x, &RowSketchConfig::with_radius(0.0)).is_err());
        assert!(sketch_rows(&x, &RowSketchConfig::with_radius(1.5)).is_err());
        assert!(sketch_rows(&Matrix::new(0, 2, vec![]).unwrap(), &RowSketchConfig::default()).is_err());
        assert_eq!(sketch_rows(&x, &RowSketchConfig::default()).unwrap().m(), 1);
    }

    #[test]
    fn monotone_on_sorted_line() {
        // For sorted 1-D input the covering is the greedy interval cover,
        // whose size cannot grow with the radius.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut v: Vec<f64> = (0..300).map(|_| rng.random::<f64>()).collect();
        v.sort_by(f64::total_cmp);
        let x = Matrix::from_columns(&[v]).unwrap();
        let mut prev = usize::MAX;
        for k in 1..=60 {
            let m = sketch_rows(&x, &RowSketchConfig::with_radius(k as f64 / 60.0)).unwrap().m();
            assert!(m <= prev);
            prev = m;
        }
    }

    #[test]
    fn count_not_monotone_in_general() {
        // A larger ball swallows the second point, which leaves the last two
        // uncovered by the remaining exemplars.
        let x = Matrix::from_rows(&[[0.9, 0.1], [0.3, 0.4], [0.0, 0.9], [0.7, 0.8]]).unwrap();
        let at = |r: f64| sketch_rows(&x, &RowSketchConfig::with_radius(r)).unwrap().m();
        assert_eq!(at(0.65), 2);
        assert_eq!(at(0.70), 3);
    }

    #[test]
    fn assignment_recovers_shuffled_sketch() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let values: Vec<f64> = (0..400).map(|_| rng.random::<f64>()).collect();
        let x = Matrix::new(200, 2, values).unwrap();
        let cfg = RowSketchConfig {
            radius: Radius::Fixed(0.15),
            visit_order: VisitOrder::ShuffledWithSeed(4),
        };
        let s = sketch_rows(&x, &cfg).unwrap();
        let rebuilt = assign_to_exemplars(&x, &s.exemplar_indices, s.radius_used).unwrap();
        assert_eq!(rebuilt.assignment(), s.assignment());
        assert_eq!(rebuilt.weights, s.weights);
    }

    fn unit_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..=80, 1usize..=5).prop_flat_map(|(n, p)| {
            prop::collection::vec(0.0f64..=1.0, n * p)
                .prop_map(move |v| Matrix::new(n, p, v).unwrap())
        })
    }

    proptest! {
        #[test]
        fn covering_packing_partition(x in unit_matrix(), r in 0.05f64..0.6, seed in any::<u64>(), shuffle in any::<bool>()) {
            let order = if shuffle { VisitOrder::ShuffledWithSeed(seed) } else { VisitOrder::Sequential };
            let r = r.min((x.n_cols() as f64).sqrt());
            let s = sketch_rows(&x, &RowSketchConfig { radius: Radius::Fixed(r), visit_order: order }).unwrap();
            prop_assert_eq!(s.weights.iter().sum::<usize>(), x.n_rows());
            let mut seen = vec![false; x.n_rows()];
            for (slot, members) in s.members.iter().enumerate() {
                let e = s.exemplar_indices[slot];
                prop_assert!(members.contains(&e));
                for &i in members {
                    prop_assert!(!seen[i]);
                    seen[i] = true;
                    prop_assert!(euclidean_distance(x.row(i), x.row(e)).unwrap() < r);
                }
            }
            for a in 0..s.m() {
                for b in a + 1..s.m() {
                    let d = euclidean_distance(x.row(s.exemplar_indices[a]), x.row(s.exemplar_indices[b])).unwrap();
                    prop_assert!(d >= r);
                }
            }
            // range preservation per column
            let e = exemplar_matrix(&s, &x).unwrap();
            for j in 0..x.n_cols() {
                let col = x.column(j);
                let ecol = e.column(j);
                let min = col.iter().copied().fold(f64::INFINITY, f64::min);
                let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(ecol.iter().copied().fold(f64::INFINITY, f64::min) < min + r);
                prop_assert!(ecol.iter().copied().fold(f64::NEG_INFINITY, f64::max) > max - r);
            }
            // determinism
            prop_assert_eq!(sketch_rows(&x, &RowSketchConfig { radius: Radius::Fixed(r), visit_order: order }).unwrap(), s);
        }
    }
}
