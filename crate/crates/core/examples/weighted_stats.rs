// Original, weighted-sketch and random-sample summaries side by side.

use dpsketch::pipeline::report::{stats_report, Panel};
use dpsketch::pipeline::{build_dataset, generate_table, run_pipeline, Mode, PipelineConfig, Synthetic};
use dpsketch::Result;

pub fn run_example() -> Result<()> {
    let table = generate_table(Synthetic::Gaussian, 20_000, 3, 42);
    let cfg = PipelineConfig {
        mode: Mode::RowsOnly,
        target_rows: Some(200),
        ..PipelineConfig::default()
    };
    let ds = build_dataset(table, &cfg.categorical, cfg.na_policy)?;
    let sketch = run_pipeline(&cfg, &ds)?.sidecar;
    let report = stats_report(&ds, &sketch.a, &sketch.weights, 1)?;
    print!("{}", report.to_delimited());

    let sk = report.get(Panel::Sketch, "x0").expect("numeric column");
    assert_eq!(sk.n as usize, ds.kept_rows.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
