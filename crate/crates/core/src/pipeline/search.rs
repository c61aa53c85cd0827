//! Bisection on the covering radius for a target exemplar count.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SketchError};
use crate::matrix::Matrix;
use crate::rows::{leader, VisitOrder};

pub const MAX_ITERATIONS: usize = 30;
/// Accepted relative gap between achieved and target exemplar counts.
pub const RELATIVE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusSearch {
    pub target: usize,
    pub radius: f64,
    pub achieved_m: usize,
    pub iterations: usize,
    /// False when the budget ran out; `radius` is then the best one seen.
    pub converged: bool,
}

/// Bisects `r` over `(0, sqrt p]` until the Leader exemplar count is within
/// 5% of `target` (rounded down, so exact for small targets).
pub fn radius_search(x: &Matrix, target: usize, order: VisitOrder) -> Result<RadiusSearch> {
    let n = x.n_rows();
    if target == 0 || target > n {
        return Err(SketchError::usage(format!(
            "target exemplar count {target} outside 1..={n}"
        )));
    }
    let tol = (RELATIVE_TOLERANCE * target as f64).floor() as usize;
    let (mut lo, mut hi) = (0.0, (x.n_cols() as f64).sqrt());
    let mut best: Option<(usize, f64, usize)> = None;
    for it in 1..=MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let m = leader(x, mid, order).m();
        let gap = m.abs_diff(target);
        if best.is_none_or(|(g, _, _)| gap < g) {
            best = Some((gap, mid, m));
        }
        if gap <= tol {
            return Ok(RadiusSearch {
                target,
                radius: mid,
                achieved_m: m,
                iterations: it,
                converged: true,
            });
        }
        if m > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (_, radius, achieved_m) = best.expect("at least one iteration");
    Ok(RadiusSearch {
        target,
        radius,
        achieved_m,
        iterations: MAX_ITERATIONS,
        converged: false,
    })
}
