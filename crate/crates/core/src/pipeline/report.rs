//! Original / sketch / random-sample summaries of the numeric columns.

use serde::{Deserialize, Serialize};

use super::ingest::Dataset;
use crate::error::{Result, SketchError};
use crate::eval::random_row_sample;
use crate::stats::{summary, weighted_summary, WeightedSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Panel {
    Original,
    Sketch,
    RandomSample,
}

impl Panel {
    fn label(self) -> &'static str {
        match self {
            Panel::Original => "original",
            Panel::Sketch => "sketch",
            Panel::RandomSample => "random_sample",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    pub panel: Panel,
    pub column: String,
    pub summary: WeightedSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub seed: u64,
    pub variance: String,
    pub median: String,
    pub rows: Vec<PanelRow>,
}

impl StatsReport {
    pub fn get(&self, panel: Panel, column: &str) -> Option<&WeightedSummary> {
        self.rows
            .iter()
            .find(|r| r.panel == panel && r.column == column)
            .map(|r| &r.summary)
    }

    /// Comma-separated, one line per panel and column.
    pub fn to_delimited(&self) -> String {
        let mut out = String::from("panel,column,m,n,min,max,mean,median,sd\n");
        for r in &self.rows {
            let s = &r.summary;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.panel.label(),
                r.column,
                s.m,
                s.n,
                s.min,
                s.max,
                s.mean,
                s.median,
                s.sd
            ));
        }
        out
    }
}

/// Summaries of every numeric column over all retained rows, over the
/// exemplar file rows `a` weighted by `weights`, and over a uniform sample of
/// `a.len()` retained rows.
pub fn stats_report(ds: &Dataset, a: &[usize], weights: &[usize], seed: u64) -> Result<StatsReport> {
    if a.len() != weights.len() || a.is_empty() {
        return Err(SketchError::usage("exemplar rows and weights must be non-empty and of equal length"));
    }
    let sample: Vec<usize> = random_row_sample(ds.kept_rows.len(), a.len(), seed)?
        .into_iter()
        .map(|i| ds.kept_rows[i])
        .collect();
    let w: Vec<u64> = weights.iter().map(|&k| k as u64).collect();
    let mut rows = Vec::new();
    for j in ds.numeric_columns() {
        let column = ds.table.header[j].clone();
        let values = |idx: &[usize]| idx.iter().map(|&i| ds.numeric_cell(i, j)).collect::<Vec<_>>();
        let panels = [
            (Panel::Original, summary(&values(&ds.kept_rows))?),
            (Panel::Sketch, weighted_summary(&values(a), &w)?),
            (Panel::RandomSample, summary(&values(&sample))?),
        ];
        rows.extend(panels.into_iter().map(|(panel, summary)| PanelRow {
            panel,
            column: column.clone(),
            summary,
        }));
    }
    Ok(StatsReport {
        seed,
        variance: "denominator = sum of weights".into(),
        median: "lower weighted median".into(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{build_dataset, read_table, CategoricalSpec, NaPolicy};

    #[test]
    fn panels_for_numeric_columns_only() {
        let ds = build_dataset(
            read_table("v,k\n1,a\n2,b\n3,a\n10,b\n".as_bytes(), "t").unwrap(),
            &CategoricalSpec::Auto,
            NaPolicy::Reject,
        )
        .unwrap();
        let r = stats_report(&ds, &[0, 3], &[3, 1], 1).unwrap();
        assert_eq!(r.rows.len(), 3);
        let s = r.get(Panel::Sketch, "v").unwrap();
        assert_eq!((s.m, s.n, s.mean, s.median, s.min, s.max), (2, 4, 3.25, 1.0, 1.0, 10.0));
        assert_eq!(r.get(Panel::Original, "v").unwrap().mean, 4.0);
        assert_eq!(r.get(Panel::RandomSample, "v").unwrap().m, 2);
        let text = r.to_delimited();
        assert!(text.starts_with("panel,column,m,n,min,max,mean,median,sd\noriginal,v,4,4,1,10,4,"));
        assert!(stats_report(&ds, &[0], &[1, 2], 1).is_err());
    }
}
