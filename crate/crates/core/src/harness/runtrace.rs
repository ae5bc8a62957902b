//! Run trace files.
//!
//! Layout:
//!
//! ```text
//! # {"problem":{...},"optimizer":{...},"seed":0,...}
//! fes,indicator
//! 150,1.2345e1
//! ...
//! # diagnostics
//! fes,k_t,fbest,w_di,w_dr
//! 180,115,3.1e2,-5e-2,-1.52e0
//! ```
//!
//! The first line is the JSON header. The diagnostics section is present for
//! OPT-GAN runs only. Floats use Rust's shortest round-trip `{:e}` form, so
//! parsing and re-serializing a file reproduces it byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::baselines::{BaselineConfig, BaselineOutcome};
use crate::benchmarks::{BenchmarkProblem, Kernel};
use crate::engine::{EpochDiagnostics, OptGanConfig, OptGanOutcome};
use crate::error::{Error, Result};
use crate::trace::{TerminationReason, TraceRecord};

pub const BUILD_ID: &str = concat!("optgan ", env!("CARGO_PKG_VERSION"));
pub const FES_ACCOUNTING: &str = "every objective query counts, including the initial optimal set";

const RECORDS_HEADER: &str = "fes,indicator";
const DIAGNOSTICS_MARKER: &str = "# diagnostics";
const DIAGNOSTICS_HEADER: &str = "fes,k_t,fbest,w_di,w_dr";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDescriptor {
    pub label: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Kernel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotated: Option<bool>,
    /// Known optimum value; absent for user-supplied objectives.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_star: Option<f64>,
}

impl ProblemDescriptor {
    pub fn from_problem(problem: &BenchmarkProblem) -> Self {
        Self {
            label: problem.label(),
            dim: problem.dim,
            kernel: Some(problem.kernel),
            instance_seed: Some(problem.instance_seed),
            rotated: Some(problem.rotated),
            f_star: Some(problem.f_star),
        }
    }

    pub fn custom(label: impl Into<String>, dim: usize, f_star: Option<f64>) -> Self {
        Self {
            label: label.into(),
            dim,
            kernel: None,
            instance_seed: None,
            rotated: None,
            f_star,
        }
    }
}

/// Optimizer name plus the settings it ran with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "settings", rename_all = "kebab-case")]
pub enum OptimizerSettings {
    OptGan(OptGanConfig),
    RandomSearch(BaselineConfig),
    NelderMead(BaselineConfig),
}

impl OptimizerSettings {
    pub fn name(&self) -> &'static str {
        match self {
            OptimizerSettings::OptGan(_) => "opt-gan",
            OptimizerSettings::RandomSearch(_) => "random-search",
            OptimizerSettings::NelderMead(_) => "nelder-mead",
        }
    }

    pub fn max_fes(&self) -> u64 {
        match self {
            OptimizerSettings::OptGan(c) => c.max_fes,
            OptimizerSettings::RandomSearch(c) | OptimizerSettings::NelderMead(c) => c.max_fes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceHeader {
    pub problem: ProblemDescriptor,
    pub optimizer: OptimizerSettings,
    pub seed: u64,
    pub build: String,
    pub fes_accounting: String,
    pub termination: TerminationReason,
    pub fes_used: u64,
    /// `None` when the best value is not finite.
    pub best_fitness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub header: TraceHeader,
    pub records: Vec<TraceRecord>,
    pub diagnostics: Vec<EpochDiagnostics>,
}

impl RunTrace {
    pub fn from_optgan(problem: ProblemDescriptor, config: &OptGanConfig, outcome: &OptGanOutcome) -> Self {
        Self {
            header: TraceHeader {
                problem,
                optimizer: OptimizerSettings::OptGan(config.clone()),
                seed: config.seed,
                build: BUILD_ID.to_string(),
                fes_accounting: FES_ACCOUNTING.to_string(),
                termination: outcome.termination,
                fes_used: outcome.state.fes,
                best_fitness: finite(outcome.best.fitness),
            },
            records: outcome.records.clone(),
            diagnostics: outcome.diagnostics.clone(),
        }
    }

    /// `settings` must be one of the baseline variants.
    pub fn from_baseline(
        problem: ProblemDescriptor,
        settings: OptimizerSettings,
        seed: u64,
        outcome: &BaselineOutcome,
    ) -> Self {
        Self {
            header: TraceHeader {
                problem,
                optimizer: settings,
                seed,
                build: BUILD_ID.to_string(),
                fes_accounting: FES_ACCOUNTING.to_string(),
                termination: outcome.termination,
                fes_used: outcome.evaluations,
                best_fitness: outcome.best.as_ref().and_then(|b| finite(b.fitness)),
            },
            records: outcome.records.clone(),
            diagnostics: Vec::new(),
        }
    }

    pub fn termination(&self) -> TerminationReason {
        self.header.termination
    }

    pub fn final_indicator(&self) -> Option<f64> {
        self.records.last().map(|r| r.indicator)
    }

    /// Checks the record invariants: `fes` strictly increasing, indicator
    /// non-increasing and not NaN, and a final record that agrees with the
    /// termination reason.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::TraceFormat(msg));
        for pair in self.records.windows(2) {
            if pair[1].fes <= pair[0].fes {
                return bad(format!("fes not increasing at {}", pair[1].fes));
            }
            if pair[1].indicator > pair[0].indicator {
                return bad(format!("indicator increased at fes {}", pair[1].fes));
            }
        }
        if self.records.iter().any(|r| r.indicator.is_nan()) {
            return bad("NaN indicator".into());
        }
        if let (Some(last), Some(_)) = (self.records.last(), self.header.problem.f_star) {
            let solved = last.indicator < 0.0;
            if solved != (self.header.termination == TerminationReason::Precision) {
                return bad(format!(
                    "termination {} disagrees with final indicator {:e}",
                    self.header.termination, last.indicator
                ));
            }
        }
        if let Some(last) = self.records.last() {
            if last.fes > self.header.fes_used {
                return bad(format!("record at fes {} beyond fes_used {}", last.fes, self.header.fes_used));
            }
        }
        Ok(())
    }

    /// Everything after the header line.
    pub fn body(&self) -> String {
        let mut out = String::new();
        out.push_str(RECORDS_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(out, "{},{:e}", r.fes, r.indicator);
        }
        if !self.diagnostics.is_empty() {
            out.push_str(DIAGNOSTICS_MARKER);
            out.push('\n');
            out.push_str(DIAGNOSTICS_HEADER);
            out.push('\n');
            for d in &self.diagnostics {
                let _ = writeln!(out, "{},{},{:e},{:e},{:e}", d.fes, d.k_t, d.fbest, d.w_di, d.w_dr);
            }
        }
        out
    }

    pub fn to_file_string(&self) -> Result<String> {
        let header = serde_json::to_string(&self.header)?;
        Ok(format!("# {header}\n{}", self.body()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::TraceFormat(format!("line {}: {msg}", line + 1));
        let mut lines = text.split_terminator('\n').enumerate();

        let (_, first) = lines.next().ok_or_else(|| bad(0, "empty trace"))?;
        let json = first.strip_prefix("# ").ok_or_else(|| bad(0, "missing header"))?;
        let header: TraceHeader = serde_json::from_str(json)?;

        match lines.next() {
            Some((_, RECORDS_HEADER)) => {}
            Some((i, _)) => return Err(bad(i, "expected `fes,indicator`")),
            None => return Err(bad(1, "missing records section")),
        }

        let mut records = Vec::new();
        let mut diagnostics = Vec::new();
        let mut in_diagnostics = false;
        while let Some((i, line)) = lines.next() {
            if !in_diagnostics && line == DIAGNOSTICS_MARKER {
                match lines.next() {
                    Some((_, DIAGNOSTICS_HEADER)) => {}
                    _ => return Err(bad(i + 1, "expected diagnostics column header")),
                }
                in_diagnostics = true;
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if in_diagnostics {
                let [fes, k_t, fbest, w_di, w_dr] = fields[..] else {
                    return Err(bad(i, "expected 5 columns"));
                };
                diagnostics.push(EpochDiagnostics {
                    fes: fes.parse().map_err(|_| bad(i, "bad fes"))?,
                    k_t: k_t.parse().map_err(|_| bad(i, "bad k_t"))?,
                    fbest: fbest.parse().map_err(|_| bad(i, "bad fbest"))?,
                    w_di: w_di.parse().map_err(|_| bad(i, "bad w_di"))?,
                    w_dr: w_dr.parse().map_err(|_| bad(i, "bad w_dr"))?,
                });
            } else {
                let [fes, indicator] = fields[..] else {
                    return Err(bad(i, "expected 2 columns"));
                };
                records.push(TraceRecord {
                    fes: fes.parse().map_err(|_| bad(i, "bad fes"))?,
                    indicator: indicator.parse().map_err(|_| bad(i, "bad indicator"))?,
                });
            }
        }
        if !text.ends_with('\n') {
            return Err(Error::TraceFormat("missing final newline".into()));
        }

        let trace = Self {
            header,
            records,
            diagnostics,
        };
        trace.validate()?;
        Ok(trace)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_file_string()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

fn finite(value: f64) -> Option<f64> {
    value.is_finite().then_some(value)
}
