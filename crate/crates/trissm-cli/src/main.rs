//! `trissm`: experiment runner for the link-analysis library.
//!
//! Subcommands take a JSON experiment spec and write reproducible CSV/JSON
//! curve data; presets regenerate the bundled studies. Set `TRISSM_WORKERS`
//! to pin the worker-thread count (results are identical for any value).

mod presets;
mod run;
mod spec;

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use run::StopOverride;
use spec::{ExperimentSpec, Mode};

#[derive(Parser)]
#[command(
    name = "trissm",
    version,
    about = "Error-rate analysis, Monte Carlo simulation, and adaptive rate \
             allocation for a column-keyed surface transmitter"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write closed-form error-probability curves for a scenario
    Analyze(RunArgs),
    /// Simulate BER and write it alongside the closed-form curves
    Simulate(RunArgs),
    /// Write the adaptive rate-allocation report for a fixed channel
    Adapt(RunArgs),
    /// Simulate uniform vs adaptive allocations on a fixed channel
    Compare(RunArgs),
    /// Run a named preset experiment
    Preset(PresetArgs),
    /// List the preset experiments
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment spec file (JSON)
    #[arg(long)]
    spec: PathBuf,
    /// Override the spec's RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Directory output files are written into
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the stop rule's bit-error target
    #[arg(long)]
    min_errors: Option<u64>,
    /// Override the stop rule's per-point trial cap
    #[arg(long)]
    max_trials: Option<u64>,
}

#[derive(Args)]
struct PresetArgs {
    /// Preset name (see `trissm presets`)
    name: String,
    /// Override the preset's fixed seed
    #[arg(long)]
    seed: Option<u64>,
    /// Directory output files are written into
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the stop rule's bit-error target
    #[arg(long)]
    min_errors: Option<u64>,
    /// Override the stop rule's per-point trial cap
    #[arg(long)]
    max_trials: Option<u64>,
}

fn main() -> Result<()> {
    init_worker_pool()?;
    match Cli::parse().command {
        Command::Analyze(args) => run_mode(Mode::Analyze, args),
        Command::Simulate(args) => run_mode(Mode::Simulate, args),
        Command::Adapt(args) => run_mode(Mode::Adapt, args),
        Command::Compare(args) => run_mode(Mode::Compare, args),
        Command::Preset(args) => {
            let stop_override = StopOverride {
                min_bit_errors: args.min_errors,
                max_trials: args.max_trials,
            };
            let files = presets::run(&args.name, &args.out, args.seed, stop_override)?;
            report(&files);
            Ok(())
        }
        Command::Presets => {
            for p in presets::catalog() {
                println!("{:<6} {}", p.name, p.description);
            }
            Ok(())
        }
    }
}

/// Honor `TRISSM_WORKERS` before any parallel work starts.
fn init_worker_pool() -> Result<()> {
    match std::env::var("TRISSM_WORKERS") {
        Ok(raw) => {
            let n: usize = raw
                .trim()
                .parse()
                .with_context(|| format!("TRISSM_WORKERS must be a positive integer, got `{raw}`"))?;
            if n == 0 {
                bail!("TRISSM_WORKERS must be positive");
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("cannot configure the worker pool")
        }
        Err(std::env::VarError::NotPresent) => Ok(()),
        Err(e) => Err(e).context("TRISSM_WORKERS is not valid UTF-8"),
    }
}

fn run_mode(expected: Mode, args: RunArgs) -> Result<()> {
    let mut spec = ExperimentSpec::load(&args.spec)?;
    if spec.mode != expected {
        bail!(
            "spec file {} declares mode `{}`, but the `{}` subcommand was invoked",
            args.spec.display(),
            spec.mode.as_str(),
            expected.as_str(),
        );
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let stop_override = StopOverride {
        min_bit_errors: args.min_errors,
        max_trials: args.max_trials,
    };
    let files = run::execute(&spec, &args.out, stop_override)?;
    report(&files);
    Ok(())
}

fn report(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}
