// Covering Gaussian rows with fixed-radius balls, and tuning the radius for a
// target number of exemplars.

use dpsketch::eval::spherical_gaussians;
use dpsketch::pipeline::radius_search;
use dpsketch::{default_radius, normalize_columns, sketch_rows, Result, RowSketchConfig, VisitOrder};

pub fn run_example() -> Result<()> {
    let (x, _) = normalize_columns(&spherical_gaussians(20_000, 3, 7))?;

    let auto = sketch_rows(&x, &RowSketchConfig::default())?;
    println!(
        "auto radius {:.4} -> {} exemplars for {} rows",
        default_radius(x.n_rows(), x.n_cols())?,
        auto.m(),
        auto.n()
    );

    let search = radius_search(&x, 200, VisitOrder::Sequential)?;
    let s = sketch_rows(&x, &RowSketchConfig::with_radius(search.radius))?;
    println!(
        "radius {:.4} after {} bisection steps -> {} exemplars",
        search.radius, search.iterations, s.m()
    );
    let heaviest = s.weights.iter().max().copied().unwrap_or(0);
    println!("weights sum to {}, heaviest ball holds {heaviest} rows", s.n());
    assert_eq!(s.n(), x.n_rows());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
