//! Batch runs over (problem, optimizer, seed) cells.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::baselines::{nelder_mead_baseline, random_search_baseline, BaselineConfig};
use super::heatmap::GeneratorSnapshot;
use super::runtrace::{OptimizerSettings, ProblemDescriptor, RunTrace};
use crate::benchmarks::{make_problem_with, BenchmarkProblem, Kernel};
use crate::engine::{optimize, OptGanConfig};
use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::seeded_rng;

/// Seeds used when a config does not list any.
pub fn default_seeds() -> Vec<u64> {
    (0..15).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problems: Vec<ProblemSpec>,
    pub optimizers: Vec<OptimizerSpec>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub max_fes: u64,
    #[serde(default)]
    pub time_limit_secs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kernel: String,
    pub dim: usize,
    #[serde(default)]
    pub instance_seed: u64,
    /// Defaults to the kernel's usual setting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotated: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    /// `opt-gan`, `random-search` or `nelder-mead`.
    pub name: String,
    #[serde(default)]
    pub overrides: Map<String, Value>,
}

/// Keys fixed by the experiment itself rather than per optimizer.
const RESERVED: [&str; 3] = ["max_fes", "seed", "time_limit_secs"];

/// One (problem, optimizer, seed) combination, fully resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub problem: BenchmarkProblem,
    pub settings: OptimizerSettings,
    pub seed: u64,
}

impl Cell {
    /// `kernel-dN-iS[-rot|-norot]_optimizer_sSEED`; the rotation tag only
    /// appears when it differs from the kernel's default.
    pub fn file_stem(&self) -> String {
        let mut label = self.problem.label();
        if self.problem.rotated != self.problem.kernel.rotated_by_default() {
            label.push_str(if self.problem.rotated { "-rot" } else { "-norot" });
        }
        format!("{label}_{}_s{}", self.settings.name(), self.seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub trace: RunTrace,
    /// Trained generator of OPT-GAN runs.
    pub generator: Option<GeneratorSnapshot>,
}

fn with_overrides<T: Serialize + serde::de::DeserializeOwned>(
    base: &T,
    overrides: &Map<String, Value>,
    name: &str,
) -> Result<T> {
    if let Some(key) = RESERVED.iter().find(|k| overrides.contains_key(**k)) {
        return Err(Error::Config(format!(
            "{name}: `{key}` is set at the experiment level, not in overrides"
        )));
    }
    let mut value = serde_json::to_value(base)?;
    if let Value::Object(map) = &mut value {
        map.extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
    }
    serde_json::from_value(value).map_err(|e| Error::Config(format!("{name} overrides: {e}")))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("experiment config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn settings_for(&self, spec: &OptimizerSpec, seed: u64) -> Result<OptimizerSettings> {
        match spec.name.as_str() {
            "opt-gan" => {
                let base = OptGanConfig {
                    max_fes: self.max_fes,
                    time_limit_secs: self.time_limit_secs,
                    seed,
                    ..OptGanConfig::default()
                };
                let config = with_overrides(&base, &spec.overrides, &spec.name)?;
                config.validate()?;
                if config.max_fes <= config.k0 as u64 {
                    return Err(Error::Config(format!(
                        "max_fes ({}) must exceed k0 ({})",
                        config.max_fes, config.k0
                    )));
                }
                Ok(OptimizerSettings::OptGan(config))
            }
            "random-search" | "nelder-mead" => {
                let base = BaselineConfig {
                    max_fes: self.max_fes,
                    time_limit_secs: self.time_limit_secs,
                    ..BaselineConfig::default()
                };
                let config = with_overrides(&base, &spec.overrides, &spec.name)?;
                config.validate()?;
                Ok(if spec.name == "random-search" {
                    OptimizerSettings::RandomSearch(config)
                } else {
                    OptimizerSettings::NelderMead(config)
                })
            }
            other => Err(Error::Config(format!(
                "unknown optimizer `{other}` (expected opt-gan, random-search or nelder-mead)"
            ))),
        }
    }

    /// Resolves every cell. All configuration errors surface here, before any
    /// run starts.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        if self.problems.is_empty() || self.optimizers.is_empty() || self.seeds.is_empty() {
            return Err(Error::Config("problems, optimizers and seeds must be non-empty".into()));
        }
        let mut problems = Vec::with_capacity(self.problems.len());
        for spec in &self.problems {
            let kernel: Kernel = spec.kernel.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
            let rotated = spec.rotated.unwrap_or(kernel.rotated_by_default());
            let problem = make_problem_with(kernel, spec.dim, spec.instance_seed, rotated)
                .map_err(|e| Error::Config(e.to_string()))?;
            problems.push(problem);
        }
        let mut cells = Vec::new();
        for problem in &problems {
            for spec in &self.optimizers {
                for &seed in &self.seeds {
                    cells.push(Cell {
                        problem: problem.clone(),
                        settings: self.settings_for(spec, seed)?,
                        seed,
                    });
                }
            }
        }
        let mut stems: Vec<String> = cells.iter().map(Cell::file_stem).collect();
        stems.sort();
        if let Some(dup) = stems.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("duplicate cell `{}`", dup[0])));
        }
        Ok(cells)
    }
}

/// Runs one cell with the RNG stream `seeded_rng(cell.seed)`.
pub fn run_cell(cell: &Cell) -> Result<CellResult> {
    let problem = &cell.problem;
    let descriptor = ProblemDescriptor::from_problem(problem);
    let mut instance = problem.instance();
    let mut rng = seeded_rng(cell.seed);
    let result = match &cell.settings {
        OptimizerSettings::OptGan(config) => {
            let outcome = optimize(&mut instance, config, &mut rng)?;
            CellResult {
                trace: RunTrace::from_optgan(descriptor, config, &outcome),
                generator: Some(GeneratorSnapshot {
                    domain: problem.domain.clone(),
                    params: outcome.state.gen.params.clone(),
                }),
            }
        }
        settings @ (OptimizerSettings::RandomSearch(config) | OptimizerSettings::NelderMead(config)) => {
            let outcome = if matches!(settings, OptimizerSettings::RandomSearch(_)) {
                random_search_baseline(&mut instance, config, &mut rng)?
            } else {
                nelder_mead_baseline(&mut instance, config, &mut rng)?
            };
            CellResult {
                trace: RunTrace::from_baseline(descriptor, settings.clone(), cell.seed, &outcome),
                generator: None,
            }
        }
    };
    if result.trace.header.fes_used != instance.evaluations() {
        return Err(Error::InvalidArgument(format!(
            "FES bookkeeping mismatch: recorded {}, counted {}",
            result.trace.header.fes_used,
            instance.evaluations()
        )));
    }
    result.trace.validate()?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellReport {
    pub stem: String,
    pub trace_path: PathBuf,
    pub outcome: std::result::Result<(), String>,
}

impl CellReport {
    pub fn succeeded(&self) -> bool {
        self.outcome.is_ok()
    }
}

fn run_and_write(cell: &Cell, out_dir: &Path) -> CellReport {
    let stem = cell.file_stem();
    let trace_path = out_dir.join(format!("{stem}.trace"));
    let outcome = run_cell(cell)
        .and_then(|result| {
            result.trace.write(&trace_path)?;
            if let Some(generator) = &result.generator {
                generator.write(&out_dir.join(format!("{stem}.generator.json")))?;
            }
            Ok(())
        })
        .map_err(|e| e.to_string());
    CellReport {
        stem,
        trace_path,
        outcome,
    }
}

/// Runs every cell on a pool of `jobs` threads (0 = one per core) and writes
/// one trace file per cell into `out_dir`. Reports come back in cell order.
pub fn run_experiment(config: &ExperimentConfig, out_dir: &Path, jobs: usize) -> Result<Vec<CellReport>> {
    let cells = config.cells()?;
    std::fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(|| cells.par_iter().map(|cell| run_and_write(cell, out_dir)).collect()))
}
