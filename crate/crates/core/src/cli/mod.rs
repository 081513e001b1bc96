//! Command-line front end.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use clap::Parser;

use crate::error::{Error, Result};
use crate::experiment::{run_experiment, steady_state, ExperimentConfig, MsdCurve, SteadyStateSummary};
use crate::filter::Variant;

pub use config::parse_config;
pub use output::{emit_csv, emit_plot};

pub const CSV_FILE: &str = "msd.csv";
pub const SVG_FILE: &str = "msd.svg";

/// Run the sparse system identification experiment and write MSD curves.
#[derive(Debug, Parser)]
#[command(name = "sparse-lms", version, about)]
pub struct Args {
    /// Configuration file; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Independent runs per cell.
    #[arg(long)]
    pub runs: Option<usize>,

    /// Update iterations per run.
    #[arg(long)]
    pub iterations: Option<usize>,

    /// Comma-separated algorithms, e.g. `lms,lp_like_llms`.
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Option<Vec<String>>,

    /// Comma-separated sparsity ratios, e.g. `1/16,4/16`.
    #[arg(long, value_delimiter = ',')]
    pub sr: Option<Vec<String>>,

    /// Also write an SVG plot.
    #[arg(long)]
    pub plot: bool,

    /// Plot MSD in dB.
    #[arg(long)]
    pub db: bool,

    /// Print the steady-state summary table.
    #[arg(long)]
    pub summary: bool,

    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

/// What to run and where to put it.
#[derive(Debug, Clone, Default)]
pub struct RunSpec {
    pub config_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub iterations: Option<usize>,
    pub algorithms: Option<Vec<Variant>>,
    /// `(numerator, denominator)` pairs.
    pub sparsity: Option<Vec<(usize, usize)>>,
    pub plot: bool,
    pub db: bool,
    pub threads: Option<usize>,
}

impl TryFrom<Args> for RunSpec {
    type Error = Error;

    fn try_from(args: Args) -> Result<Self> {
        let algorithms = args
            .algorithms
            .map(|list| list.iter().map(|s| s.parse()).collect::<Result<Vec<Variant>>>())
            .transpose()?;
        let sparsity = args
            .sr
            .map(|list| list.iter().map(|s| parse_ratio(s)).collect::<Result<Vec<_>>>())
            .transpose()?;
        Ok(Self {
            config_path: args.config,
            out_dir: args.out,
            seed: args.seed,
            runs: args.runs,
            iterations: args.iterations,
            algorithms,
            sparsity,
            plot: args.plot,
            db: args.db,
            threads: args.threads,
        })
    }
}

fn parse_ratio(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Validation(format!("sparsity ratio `{s}` must look like 4/16"));
    let (num, den) = s.trim().split_once('/').ok_or_else(bad)?;
    Ok((
        num.trim().parse().map_err(|_| bad())?,
        den.trim().parse().map_err(|_| bad())?,
    ))
}

#[derive(Debug)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub curves: Vec<MsdCurve>,
    pub summaries: Vec<SteadyStateSummary>,
    pub csv_path: PathBuf,
    pub svg_path: Option<PathBuf>,
}

/// Loads the configuration and applies command-line overrides.
pub fn resolve_config(spec: &RunSpec) -> Result<ExperimentConfig> {
    let mut config = match &spec.config_path {
        Some(path) => parse_config(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = spec.seed {
        config.master_seed = seed;
    }
    if let Some(runs) = spec.runs {
        config.runs = runs;
    }
    if let Some(iterations) = spec.iterations {
        config.iterations = iterations;
        config.steady_state_window = config.steady_state_window.min(iterations);
    }
    if let Some(algorithms) = &spec.algorithms {
        config.algorithms = algorithms.clone();
    }
    if let Some(ratios) = &spec.sparsity {
        let mut levels = Vec::with_capacity(ratios.len());
        for &(num, den) in ratios {
            if den != config.n_taps {
                return Err(Error::Validation(format!(
                    "sparsity ratio {num}/{den}: denominator must equal n_taps ({})",
                    config.n_taps
                )));
            }
            levels.push(num);
        }
        config.sparsity_levels = levels;
    }
    config.validate()?;
    Ok(config)
}

/// Runs the experiment and writes the CSV (and optionally the SVG).
pub fn run(spec: &RunSpec) -> Result<RunOutput> {
    let config = resolve_config(spec)?;
    std::fs::create_dir_all(&spec.out_dir)?;

    let curves = match spec.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Validation(format!("cannot start {n} worker threads: {e}")))?
            .install(|| run_experiment(&config))?,
        None => run_experiment(&config)?,
    };
    let summaries = curves
        .iter()
        .map(|c| steady_state(c, config.steady_state_window))
        .collect::<Result<Vec<_>>>()?;

    let csv_path = spec.out_dir.join(CSV_FILE);
    emit_csv(&curves, &csv_path)?;
    let svg_path = if spec.plot {
        let path = spec.out_dir.join(SVG_FILE);
        emit_plot(&curves, &path, spec.db)?;
        Some(path)
    } else {
        None
    };
    Ok(RunOutput {
        config,
        curves,
        summaries,
        csv_path,
        svg_path,
    })
}

/// Entry point shared by the binary. Returns the process exit status.
pub fn main_with_args(args: Args) -> i32 {
    let summary = args.summary;
    let result = RunSpec::try_from(args).and_then(|spec| run(&spec));
    match result {
        Ok(out) => {
            if summary {
                print!("{}", output::format_summary(&out.summaries));
            }
            eprintln!("wrote {}", display(&out.csv_path));
            if let Some(svg) = &out.svg_path {
                eprintln!("wrote {}", display(svg));
            }
            0
        }
        Err(e) => {
            eprintln!("error: {:#}", anyhow::Error::from(e));
            1
        }
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}
