//! Command-line front end; `main` only forwards to [`run`].

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cols::ColSketchConfig;
use crate::error::{Result, SketchError};
use crate::eval::{
    compare_column_methods, distance_pairs, exhaustive_best_columns, random_row_sample,
    sampling_contrast, score_columns, write_distance_pairs, EvalReport, SamplingContrast,
};
use crate::matrix::condensed_sq_dist;
use crate::pipeline::report::{stats_report, StatsReport};
use crate::pipeline::{
    column_engine, generate_table, ingest_csv, normalized_features, recompute_bounds, run_pipeline,
    sidecar_path, write_atomic, CategoricalSpec, Mode, NaPolicy, OrderChoice, PipelineConfig,
    SketchSidecar, Synthetic,
};
use crate::rows::Radius;

#[derive(Debug, Parser)]
#[command(name = "dpsketch", version, about = "Distance-preserving row and column sketches of CSV files")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sketch rows and columns, larger dimension first.
    Sketch(SketchArgs),
    /// Sketch rows only; all columns kept.
    SketchRows(SketchArgs),
    /// Sketch columns only; all rows kept.
    SketchCols(SketchArgs),
    /// Original / sketch / random-sample summaries of numeric columns.
    Stats(StatsArgs),
    /// Recompute the bound report recorded in a sidecar.
    Bounds(BoundsArgs),
    /// Compare sketches with random baselines.
    Eval(EvalArgs),
    /// Write a synthetic dataset.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    Auto,
    RowsFirst,
    ColsFirst,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum NaArg {
    Reject,
    Drop,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Gaussian,
    Clustered,
    Mixed,
}

fn parse_radius(s: &str) -> std::result::Result<Radius, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Radius::Auto);
    }
    s.parse::<f64>()
        .map(Radius::Fixed)
        .map_err(|_| format!("expected a number or \"auto\", got {s:?}"))
}

#[derive(Debug, Args)]
struct SketchOptions {
    /// Input CSV with a header row.
    input: PathBuf,
    /// Covering radius in normalized units, or "auto".
    #[arg(long, default_value = "auto", value_parser = parse_radius)]
    radius: Radius,
    /// Stop adding columns once this correlation is reached.
    #[arg(long, default_value_t = 0.95)]
    max_correlation: f64,
    #[arg(long)]
    max_columns: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    order: OrderArg,
    /// Sketch on original scales.
    #[arg(long)]
    no_normalize: bool,
    /// Comma-separated categorical columns; default detects them.
    #[arg(long, value_delimiter = ',')]
    categorical: Option<Vec<String>>,
    /// Missing-value policy.
    #[arg(long, value_enum, default_value = "reject")]
    na: NaArg,
    #[arg(long, env = "SKETCH_SEED")]
    seed: Option<u64>,
    /// Visit rows in seeded random order.
    #[arg(long)]
    shuffle: bool,
    /// Record the member rows of every exemplar in the sidecar.
    #[arg(long)]
    members: bool,
    /// Search the radius for about this many exemplars.
    #[arg(long)]
    target_rows: Option<usize>,
}

impl SketchOptions {
    fn config(&self, mode: Mode) -> PipelineConfig {
        PipelineConfig {
            radius: self.radius,
            target_rows: self.target_rows,
            max_correlation: self.max_correlation,
            max_columns: self.max_columns,
            order: match self.order {
                OrderArg::Auto => OrderChoice::Auto,
                OrderArg::RowsFirst => OrderChoice::RowsFirst,
                OrderArg::ColsFirst => OrderChoice::ColsFirst,
            },
            mode,
            normalize: !self.no_normalize,
            categorical: match &self.categorical {
                Some(names) => CategoricalSpec::Declared(names.clone()),
                None => CategoricalSpec::Auto,
            },
            na_policy: match self.na {
                NaArg::Reject => NaPolicy::Reject,
                NaArg::Drop => NaPolicy::DropRows,
            },
            seed: self.seed,
            shuffle: self.shuffle,
            emit_members: self.members,
        }
    }
}

#[derive(Debug, Args)]
struct SketchArgs {
    #[command(flatten)]
    opts: SketchOptions,
    /// Sketched CSV; the sidecar goes next to it as <name>.sketch.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(flatten)]
    opts: SketchOptions,
    /// Use the rows of an existing sketch instead of sketching again.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    /// Print JSON instead of delimited text.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// The CSV the sidecar was written for.
    input: PathBuf,
    #[arg(long)]
    sidecar: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    opts: SketchOptions,
    /// Number of random baselines.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    /// Rows used for the column comparison (sampled when the file is larger).
    #[arg(long, default_value_t = 2000)]
    eval_rows: usize,
    /// Write (original, reduced) distance pairs of the column sketch here.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Write the full report as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    kind: KindArg,
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(long, env = "SKETCH_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct EvalSummary {
    pub rows_used: usize,
    pub columns: Vec<EvalReport>,
    pub exhaustive: Option<EvalReport>,
    pub sampling: SamplingContrast,
}

/// Parses `args` (program name first), runs one command, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dpsketch: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Sketch(a) => sketch(a, Mode::Both),
        Command::SketchRows(a) => sketch(a, Mode::RowsOnly),
        Command::SketchCols(a) => sketch(a, Mode::ColsOnly),
        Command::Stats(a) => stats(a),
        Command::Bounds(a) => bounds(a),
        Command::Eval(a) => eval(a),
        Command::Gen(a) => generate(a),
    }
}

const INVARIANT_FAILED: i32 = 4;

fn sketch(args: SketchArgs, mode: Mode) -> Result<i32> {
    let cfg = args.opts.config(mode);
    let ds = ingest_csv(&args.opts.input, &cfg.categorical, cfg.na_policy)?;
    for &i in &ds.dropped_rows {
        eprintln!("warning: dropped row {i} with missing values");
    }
    let out = run_pipeline(&cfg, &ds)?;
    out.write(&args.out)?;
    let sc = &out.sidecar;
    println!(
        "kept {} of {} rows and {} of {} columns",
        sc.a.len(),
        ds.kept_rows.len(),
        sc.b.len(),
        ds.table.n_cols()
    );
    if let Some(r) = sc.radius_used {
        println!("radius {r}");
    }
    if let Some(c) = sc.achieved_correlation {
        println!("correlation {c}");
    }
    println!("sidecar {}", sidecar_path(&args.out).display());
    for note in &sc.notes {
        eprintln!("note: {note}");
    }
    Ok(if out.invariants_held() { 0 } else { INVARIANT_FAILED })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn stats(args: StatsArgs) -> Result<i32> {
    let seed = args.opts.seed.unwrap_or(0);
    let (ds, a, weights) = match &args.sidecar {
        Some(path) => {
            let sc = SketchSidecar::read(path)?;
            let ds = ingest_csv(&args.opts.input, &sc.config.categorical, sc.config.na_policy)?;
            (ds, sc.a, sc.weights)
        }
        None => {
            let cfg = args.opts.config(Mode::RowsOnly);
            let ds = ingest_csv(&args.opts.input, &cfg.categorical, cfg.na_policy)?;
            let out = run_pipeline(&cfg, &ds)?;
            (ds, out.sidecar.a, out.sidecar.weights)
        }
    };
    let report: StatsReport = stats_report(&ds, &a, &weights, seed)?;
    let text = if args.json {
        serde_json::to_string_pretty(&report)? + "\n"
    } else {
        report.to_delimited()
    };
    emit(args.out.as_deref(), &text)?;
    Ok(0)
}

fn bounds(args: BoundsArgs) -> Result<i32> {
    let sc = SketchSidecar::read(&args.sidecar)?;
    let ds = ingest_csv(&args.input, &sc.config.categorical, sc.config.na_policy)?;
    let report = recompute_bounds(&ds, &sc)?;
    emit(args.out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    let matches = report == sc.bounds;
    if !matches {
        eprintln!("recomputed bound report differs from the one stored in the sidecar");
    }
    if !report.all_hold() {
        eprintln!("a distance bound check failed");
    }
    Ok(if matches && report.all_hold() { 0 } else { INVARIANT_FAILED })
}

fn eval(args: EvalArgs) -> Result<i32> {
    let cfg = args.opts.config(Mode::RowsOnly);
    let ds = ingest_csv(&args.opts.input, &cfg.categorical, cfg.na_policy)?;
    let (x, _) = normalized_features(&ds, cfg.normalize)?;
    let base = cfg.seed.unwrap_or(0);
    let seeds: Vec<u64> = (0..args.seeds.max(1)).map(|k| base + k).collect();

    let rows = run_pipeline(&cfg, &ds)?;
    let exemplars = rows.sidecar.row_exemplars.clone().unwrap_or_default();
    let sampling = sampling_contrast(&x, &exemplars, &seeds)?;

    let sub = if x.n_rows() > args.eval_rows {
        x.select_rows(&random_row_sample(x.n_rows(), args.eval_rows, base)?)?
    } else {
        x
    };
    let col_cfg = ColSketchConfig {
        max_correlation: cfg.max_correlation,
        max_columns: cfg.max_columns,
        engine: column_engine(&sub),
    };
    let columns = compare_column_methods(&sub, &col_cfg, &seeds)?;
    let k = columns[0].size;
    let exhaustive = match exhaustive_best_columns(&sub, k) {
        Ok((subset, _)) => Some(score_columns(&sub, &subset, "exhaustive", None, Instant::now())?),
        Err(SketchError::Usage(_)) => None,
        Err(e) => return Err(e),
    };

    if let Some(path) = &args.pairs {
        let greedy = crate::cols::sketch_columns(&sub, &col_cfg)?;
        let full = condensed_sq_dist(&sub)?;
        let reduced = condensed_sq_dist(&sub.select_columns(&greedy.selected)?)?;
        let mut buf = Vec::new();
        write_distance_pairs(&distance_pairs(&full, &reduced)?, &mut buf)?;
        write_atomic(path, &buf)?;
    }

    let summary = EvalSummary {
        rows_used: sub.n_rows(),
        columns,
        exhaustive,
        sampling,
    };
    let mut text = String::from("method,size,correlation,max_discrepancy,runtime_secs,seed\n");
    for r in summary.columns.iter().chain(&summary.exhaustive) {
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.method,
            r.size,
            r.correlation,
            r.max_discrepancy,
            r.runtime_secs,
            r.seed.map(|s| s.to_string()).unwrap_or_default()
        ));
    }
    let s = &summary.sampling;
    text.push_str(&format!(
        "row sketch extremes vs random samples (m={}): max {}/{} ({:.3}), min {}/{} ({:.3})\n",
        s.m,
        s.max_wins,
        s.cases,
        s.max_fraction(),
        s.min_wins,
        s.cases,
        s.min_fraction()
    ));
    print!("{text}");
    if let Some(path) = &args.out {
        write_atomic(path, (serde_json::to_string_pretty(&summary)? + "\n").as_bytes())?;
    }
    Ok(0)
}

fn generate(args: GenArgs) -> Result<i32> {
    let kind = match args.kind {
        KindArg::Gaussian => Synthetic::Gaussian,
        KindArg::Clustered => Synthetic::Clustered,
        KindArg::Mixed => Synthetic::Mixed,
    };
    if args.rows == 0 || args.cols == 0 {
        return Err(SketchError::usage("--rows and --cols must be positive"));
    }
    let table = generate_table(kind, args.rows, args.cols, args.seed);
    let mut buf = Vec::new();
    table.write(&mut buf)?;
    write_atomic(&args.out, &buf)?;
    Ok(0)
}
