// Condensed squared distances, their per-column decomposition, and the
// Frobenius cosine between two distance structures.

use dpsketch::matrix::{accumulate, condensed_sq_dist, condensed_sq_dist_column, frobenius_correlation};
use dpsketch::{Matrix, Result};

pub fn run_example() -> Result<()> {
    let x = Matrix::from_rows(&[[0.0, 1.0, 2.0], [0.0, 4.0, 5.0], [0.0, 6.0, 9.0]])?;
    let full = condensed_sq_dist(&x)?;
    println!("pairs (i<j): {:?}", full.pairs().map(|(p, _)| p).collect::<Vec<_>>());
    println!("D_X      = {:?}", full.as_slice());

    let per_column: Vec<_> = (0..x.n_cols())
        .map(|j| condensed_sq_dist_column(&x.column(j)))
        .collect::<Result<_>>()?;
    let mut sum = per_column[0].clone();
    for d in &per_column[1..] {
        sum = accumulate(&sum, d)?;
    }
    assert_eq!(sum, full);
    for (j, d) in per_column.iter().enumerate() {
        println!(
            "D({}) = {:?}  cosine with D_X = {:.6}",
            j + 1,
            d.as_slice(),
            frobenius_correlation(d, &full)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
