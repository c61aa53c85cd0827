// Greedy columns against random subsets and the exhaustive optimum, and row
// sketch extremes against random samples.

use dpsketch::eval::{
    clustered_gaussians, compare_column_methods, exhaustive_best_columns, sampling_contrast,
    spherical_gaussians,
};
use dpsketch::cols::ColumnEngine;
use dpsketch::{normalize_columns, sketch_rows, ColSketchConfig, Result, RowSketchConfig};

pub fn run_example() -> Result<()> {
    let (x, _) = normalize_columns(&clustered_gaussians(200, 10, 3))?;
    let cfg = ColSketchConfig {
        max_correlation: 1.0,
        max_columns: Some(3),
        engine: ColumnEngine::Cached,
    };
    for r in compare_column_methods(&x, &cfg, &[1, 2, 3])? {
        println!("{:<15} k={} correlation {:.4} max discrepancy {:.4}", r.method, r.size, r.correlation, r.max_discrepancy);
    }
    let (best, c) = exhaustive_best_columns(&x, 3)?;
    println!("exhaustive      k=3 {best:?} correlation {c:.4}");

    let (g, _) = normalize_columns(&spherical_gaussians(10_000, 3, 9))?;
    let s = sketch_rows(&g, &RowSketchConfig::with_radius(0.12))?;
    let seeds: Vec<u64> = (0..20).collect();
    let contrast = sampling_contrast(&g, &s.exemplar_indices, &seeds)?;
    println!(
        "m={}: sketch max >= sample max in {:.0}% of cases, min <= sample min in {:.0}%",
        contrast.m,
        100.0 * contrast.max_fraction(),
        100.0 * contrast.min_fraction()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
