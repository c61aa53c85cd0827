// Greedy column selection on Gaussian data with two clustered columns.

use dpsketch::eval::clustered_gaussians;
use dpsketch::{normalize_columns, project_columns, sketch_columns, ColSketchConfig, Result};

pub fn run_example() -> Result<()> {
    let (x, _) = normalize_columns(&clustered_gaussians(400, 30, 11))?;
    let cfg = ColSketchConfig {
        max_correlation: 0.9,
        ..ColSketchConfig::default()
    };
    let s = sketch_columns(&x, &cfg)?;
    for step in &s.trace {
        println!("+ column {:>2}  correlation {:.4}", step.column, step.correlation);
    }
    println!("kept {} of {} columns", s.k(), x.n_cols());
    let sub = project_columns(&x, &s)?;
    assert_eq!(sub.n_cols(), s.k());
    // the two clustered columns carry most of the distance structure
    assert!(s.selected[..2].contains(&2) && s.selected[..2].contains(&3));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
