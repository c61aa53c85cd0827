//! Synthetic input files.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ingest::Table;
use crate::eval::{clustered_gaussians, spherical_gaussians};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Synthetic {
    /// Independent standard normal columns.
    Gaussian,
    /// Columns 2 and 3 mix two and three separated Gaussians.
    Clustered,
    /// Gaussian columns with every fourth column replaced by labels.
    Mixed,
}

fn header(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("x{j}")).collect()
}

fn from_matrix(x: &Matrix) -> Table {
    Table {
        header: header(x.n_cols()),
        cells: x
            .rows()
            .map(|r| r.iter().map(|v| v.to_string()).collect())
            .collect(),
    }
}

pub fn generate_table(kind: Synthetic, n: usize, p: usize, seed: u64) -> Table {
    match kind {
        Synthetic::Gaussian => from_matrix(&spherical_gaussians(n, p, seed)),
        Synthetic::Clustered => from_matrix(&clustered_gaussians(n, p, seed)),
        Synthetic::Mixed => {
            let x = spherical_gaussians(n, p, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
            let mut t = from_matrix(&x);
            for j in (3..p).step_by(4) {
                t.header[j] = format!("c{j}");
                let levels = 2 + j % 4;
                for (i, row) in t.cells.iter_mut().enumerate() {
                    // labels follow the neighbouring numeric column, with some noise
                    let level = if rng.random_bool(0.8) {
                        ((x.get(i, j - 1) + 3.0).max(0.0) as usize * levels / 6).min(levels - 1)
                    } else {
                        rng.random_range(0..levels)
                    };
                    row[j] = format!("L{level}");
                }
            }
            t
        }
    }
}
