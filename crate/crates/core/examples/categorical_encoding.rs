// Numeric scores for a categorical column.

use dpsketch::categorical::{encode, CategoricalColumn};
use dpsketch::Result;

pub fn run_example() -> Result<()> {
    let labels = ["red", "green", "red", "blue", "green", "red", "blue", "red"];
    let col = CategoricalColumn::new("colour", labels.iter().map(|s| s.to_string()).collect());
    let (enc, scores) = encode(&col)?;
    println!("levels {:?}", enc.levels);
    println!("eigenvalues {:?}", enc.eigenvalues);
    for (label, row) in labels.iter().zip(scores.rows()) {
        println!("{label:>6} -> {row:.4?}");
    }
    // L levels give at most L - 1 non-null components
    assert_eq!(enc.retained, enc.levels.len() - 1);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
