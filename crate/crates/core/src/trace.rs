//! Types shared by every optimizer's run record.

use serde::{Deserialize, Serialize};

/// Precision level subtracted in the performance indicator.
pub const DEFAULT_PREC: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub fes: u64,
    pub indicator: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    /// `fbest - f* - prec < 0`.
    Precision,
    Budget,
    Time,
}

impl TerminationReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            TerminationReason::Precision => "precision",
            TerminationReason::Budget => "budget",
            TerminationReason::Time => "time",
        }
    }
}

impl std::fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `fbest - f* - prec` when the optimum is known, otherwise `fbest` itself.
pub fn indicator(fbest: f64, optimum: Option<f64>, prec: f64) -> f64 {
    match optimum {
        Some(f_star) => fbest - f_star - prec,
        None => fbest,
    }
}

/// Appends a record unless the FES count did not advance, in which case the
/// last record is overwritten. Keeps `fes` strictly increasing.
pub(crate) fn push_record(records: &mut Vec<TraceRecord>, fes: u64, indicator: f64) {
    match records.last_mut() {
        Some(last) if last.fes == fes => last.indicator = last.indicator.min(indicator),
        _ => records.push(TraceRecord { fes, indicator }),
    }
}
