//! Empirical cumulative distribution of runtimes over (trace, target) pairs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::TraceRecord;

/// `10^2, 10^1, ..., 10^-8`.
pub fn default_targets() -> Vec<f64> {
    (-8..=2).rev().map(|e| 10f64.powi(e)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcdfCurve {
    pub budgets: Vec<u64>,
    /// Fraction of (trace, target) pairs solved within each budget.
    pub proportion: Vec<f64>,
}

impl EcdfCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("budget,proportion\n");
        for (b, p) in self.budgets.iter().zip(&self.proportion) {
            out.push_str(&format!("{b},{p}\n"));
        }
        out
    }
}

/// FES at which `records` first has an indicator below `target`.
pub fn first_hit(records: &[TraceRecord], target: f64) -> Option<u64> {
    records.iter().find(|r| r.indicator < target).map(|r| r.fes)
}

/// A pair counts as solved within budget `b` when the trace has a record with
/// `fes <= b` and `indicator < target`.
pub fn compute_ecdf<T: AsRef<[TraceRecord]>>(traces: &[T], targets: &[f64], budgets: &[u64]) -> Result<EcdfCurve> {
    if traces.is_empty() {
        return Err(Error::EmptyBatch("traces"));
    }
    if targets.is_empty() {
        return Err(Error::EmptyBatch("targets"));
    }
    if targets.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("targets"));
    }
    if budgets.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("budgets must be strictly increasing".into()));
    }

    let mut hits: Vec<u64> = traces
        .iter()
        .flat_map(|t| targets.iter().filter_map(|&target| first_hit(t.as_ref(), target)))
        .collect();
    hits.sort_unstable();
    let pairs = (traces.len() * targets.len()) as f64;
    let proportion = budgets
        .iter()
        .map(|&b| hits.partition_point(|&h| h <= b) as f64 / pairs)
        .collect();
    Ok(EcdfCurve {
        budgets: budgets.to_vec(),
        proportion,
    })
}

/// Every distinct `fes` value that appears in any trace, ascending.
pub fn budgets_from_traces<T: AsRef<[TraceRecord]>>(traces: &[T]) -> Vec<u64> {
    let mut budgets: Vec<u64> = traces.iter().flat_map(|t| t.as_ref().iter().map(|r| r.fes)).collect();
    budgets.sort_unstable();
    budgets.dedup();
    budgets
}

/// Per-budget spread of the best-so-far indicator across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub budget: u64,
    /// Runs with at least one record by this budget.
    pub runs: usize,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

/// Indicator of the last record at or before `budget`.
pub fn indicator_at(records: &[TraceRecord], budget: u64) -> Option<f64> {
    let idx = records.partition_point(|r| r.fes <= budget);
    idx.checked_sub(1).map(|i| records[i].indicator)
}

/// Min/median/max across runs at each budget. Budgets that no run has reached
/// yet are skipped.
pub fn convergence_bands<T: AsRef<[TraceRecord]>>(traces: &[T], budgets: &[u64]) -> Vec<Band> {
    budgets
        .iter()
        .filter_map(|&budget| {
            let mut values: Vec<f64> = traces
                .iter()
                .filter_map(|t| indicator_at(t.as_ref(), budget))
                .collect();
            if values.is_empty() {
                return None;
            }
            values.sort_by(f64::total_cmp);
            Some(Band {
                budget,
                runs: values.len(),
                min: values[0],
                median: median_sorted(&values),
                max: values[values.len() - 1],
            })
        })
        .collect()
}

pub fn bands_to_csv(bands: &[Band]) -> String {
    let mut out = String::from("# range = per-budget min and max across runs\nbudget,runs,min,median,max\n");
    for b in bands {
        out.push_str(&format!("{},{},{:e},{:e},{:e}\n", b.budget, b.runs, b.min, b.median, b.max));
    }
    out
}

/// Median of an ascending slice; the mean of the two middle values for even
/// lengths.
pub fn median_sorted(values: &[f64]) -> f64 {
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}
