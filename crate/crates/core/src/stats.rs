//! Frequency-weighted summaries of sketched rows.
//!
//! An exemplar stands for every member of its ball, so summaries weight each
//! exemplar value by its member count. The variance uses the total weight as
//! its denominator and the median is the lower weighted median.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SketchError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSummary {
    /// Distinct points summarized.
    pub m: usize,
    /// Total weight.
    pub n: u64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
}

pub fn weighted_summary(values: &[f64], weights: &[u64]) -> Result<WeightedSummary> {
    if values.is_empty() {
        return Err(SketchError::usage("cannot summarize an empty sequence"));
    }
    if values.len() != weights.len() {
        return Err(SketchError::usage(format!(
            "{} values but {} weights",
            values.len(),
            weights.len()
        )));
    }
    if weights.contains(&0) {
        return Err(SketchError::usage("weights must be at least 1"));
    }
    let total: u64 = weights.iter().sum();
    let w = total as f64;
    let mean = values
        .iter()
        .zip(weights)
        .map(|(x, &k)| x * k as f64)
        .sum::<f64>()
        / w;
    let var = values
        .iter()
        .zip(weights)
        .map(|(x, &k)| k as f64 * (x - mean).powi(2))
        .sum::<f64>()
        / w;

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut cumulative = 0u64;
    let mut median = values[order[order.len() - 1]];
    for &i in &order {
        cumulative += weights[i];
        // cumulative >= total / 2, in integers
        if 2 * cumulative >= total {
            median = values[i];
            break;
        }
    }

    Ok(WeightedSummary {
        m: values.len(),
        n: total,
        min: values[order[0]],
        max: values[order[order.len() - 1]],
        mean,
        median,
        sd: var.sqrt(),
    })
}

/// Unit-weight summary.
pub fn summary(values: &[f64]) -> Result<WeightedSummary> {
    weighted_summary(values, &vec![1; values.len()])
}
