// Empirical distance distortion of a combined sketch against the worst-case bounds.

use dpsketch::eval::spherical_gaussians;
use dpsketch::{
    exemplar_matrix, normalize_columns, sketch_columns, sketch_rows, verify_bounds, ColSketchConfig,
    Result, RowSketchConfig, SketchOrder,
};

pub fn run_example() -> Result<()> {
    let (x, _) = normalize_columns(&spherical_gaussians(1_500, 6, 5))?;
    let rows = sketch_rows(&x, &RowSketchConfig::with_radius(0.3))?;
    let cols = sketch_columns(&exemplar_matrix(&rows, &x)?, &ColSketchConfig::default())?;
    let report = verify_bounds(&x, &rows, &cols, SketchOrder::RowsFirst)?;

    let r = report.rows.as_ref().expect("row check");
    println!(
        "rows: K(r)={} max |d2 - d2_R| = {:.4} <= {:.4}; total {:.1} <= {:.1}",
        r.k_r, r.empirical_max, r.pairwise_bound, r.empirical_total, r.total_bound
    );
    if let Some(c) = &report.columns {
        println!(
            "columns: k={} eps={:.4} max |D_X - D_C| = {:.4} <= {:.4}",
            c.k, c.epsilon, c.empirical_max, c.bound
        );
    }
    assert!(report.all_hold());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
