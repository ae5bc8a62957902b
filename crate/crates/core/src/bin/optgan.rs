use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use optgan::benchmarks::Kernel;
use optgan::harness::ecdf::{bands_to_csv, budgets_from_traces, compute_ecdf, convergence_bands, default_targets};
use optgan::harness::experiment::{run_experiment, ExperimentConfig};
use optgan::harness::heatmap::{export_generator_heatmap, GeneratorSnapshot, DEFAULT_HEATMAP_SAMPLES};
use optgan::harness::runtrace::RunTrace;
use optgan::{seeded_rng, Error};

#[derive(Parser)]
#[command(name = "optgan", version, about = "OPT-GAN optimizer and experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (problem, optimizer, seed) cell of an experiment config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "traces")]
        out: PathBuf,
        /// Worker threads; 0 uses one per core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// ECDF of runtimes over (trace, target) pairs, as CSV.
    Ecdf {
        /// Glob matching trace files, e.g. 'traces/*_opt-gan_*.trace'.
        #[arg(long)]
        traces: String,
        /// Comma-separated indicator targets; defaults to 1e2,1e1,...,1e-8.
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<f64>>,
        /// Comma-separated budgets; defaults to every FES value in the traces.
        #[arg(long, value_delimiter = ',')]
        budgets: Option<Vec<u64>>,
    },
    /// Per-budget min/median/max indicator across traces, as CSV.
    Bands {
        #[arg(long)]
        traces: String,
        #[arg(long, value_delimiter = ',')]
        budgets: Option<Vec<u64>>,
    },
    /// Density grid of the trained generator of a 2-D OPT-GAN run.
    Heatmap {
        /// Trace file; the generator is read from the `.generator.json` next to it.
        #[arg(long)]
        trace: PathBuf,
        #[arg(long, default_value = "100x100", value_parser = parse_resolution)]
        res: (usize, usize),
        #[arg(long, default_value_t = DEFAULT_HEATMAP_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Benchmark functions.
    Bench {
        #[command(subcommand)]
        command: BenchCommand,
    },
}

#[derive(Subcommand)]
enum BenchCommand {
    /// List the available kernels.
    List,
}

fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let (gx, gy) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected GXxGY, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((parse(gx)?, parse(gy)?))
}

fn load_traces(pattern: &str) -> Result<Vec<RunTrace>, Error> {
    let paths = glob::glob(pattern).map_err(|e| Error::InvalidArgument(format!("bad glob: {e}")))?;
    let mut traces = Vec::new();
    for path in paths {
        let path = path.map_err(|e| Error::InvalidArgument(e.to_string()))?;
        traces.push(RunTrace::read(&path)?);
    }
    if traces.is_empty() {
        return Err(Error::InvalidArgument(format!("no trace files match `{pattern}`")));
    }
    Ok(traces)
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) -> Result<(), Error> {
    use std::io::Write;
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn generator_path(trace: &Path) -> PathBuf {
    trace.with_extension("generator.json")
}

fn run(config: &Path, out: &Path, jobs: usize) -> ExitCode {
    let config = match ExperimentConfig::load(config).and_then(|c| c.cells().map(|_| c)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let reports = match run_experiment(&config, out, jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if matches!(e, Error::Config(_)) { 2 } else { 1 });
        }
    };
    let mut failed = 0;
    for r in &reports {
        match &r.outcome {
            Ok(()) => println!("ok     {}", r.trace_path.display()),
            Err(e) => {
                failed += 1;
                println!("FAILED {}: {e}", r.stem);
            }
        }
    }
    println!("{} cells, {} failed", reports.len(), failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, jobs } => return run(&config, &out, jobs),
        Command::Ecdf {
            traces,
            targets,
            budgets,
        } => load_traces(&traces).and_then(|traces| {
            let records: Vec<_> = traces.iter().map(|t| t.records.clone()).collect();
            let budgets = budgets.unwrap_or_else(|| budgets_from_traces(&records));
            let targets = targets.unwrap_or_else(default_targets);
            let curve = compute_ecdf(&records, &targets, &budgets)?;
            emit(&curve.to_csv())
        }),
        Command::Bands { traces, budgets } => load_traces(&traces).and_then(|traces| {
            let records: Vec<_> = traces.iter().map(|t| t.records.clone()).collect();
            let budgets = budgets.unwrap_or_else(|| budgets_from_traces(&records));
            emit(&bands_to_csv(&convergence_bands(&records, &budgets)))
        }),
        Command::Heatmap {
            trace,
            res,
            samples,
            seed,
            out,
        } => GeneratorSnapshot::read(&generator_path(&trace)).and_then(|snap| {
            let grid = export_generator_heatmap(&snap.params, &snap.domain, res, samples, &mut seeded_rng(seed))?;
            match out {
                Some(path) => grid.write_csv(&path),
                None => emit(&grid.to_csv()),
            }
        }),
        Command::Bench {
            command: BenchCommand::List,
        } => {
            let mut text = String::from("kernel,suite,lower,upper,min_dim,rotated_by_default\n");
            for k in Kernel::ALL {
                let (lo, hi) = k.bounds();
                text.push_str(&format!(
                    "{},{},{lo},{hi},{},{}\n",
                    k.name(),
                    k.suite().name(),
                    k.min_dim(),
                    k.rotated_by_default()
                ));
            }
            emit(&text)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
